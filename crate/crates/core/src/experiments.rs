//! Monte Carlo harness: simulation study, null calibration, ridge/LOO
//! conjecture diagnostics.
