//! Monte Carlo experiment harness (configuration, runner, emission).
