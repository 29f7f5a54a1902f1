//! Published reference values used by the self-test and the test suites.

/// Printed `K` for three variables.
pub const K3: [&str; 6] = [
    "11110000", "11001100", "10101010", "00000011", "00000101", "00010001",
];

/// Printed `K` for four variables.
pub const K4: [&str; 10] = [
    "1111111100000000",
    "1111000011110000",
    "1100110011001100",
    "1010101010101010",
    "0000000000001111",
    "0000000000110011",
    "0000000001010101",
    "0000001100000011",
    "0000010100000101",
    "0001000100010001",
];

/// `diag(Λ)` of the instance that violates the triple bounds.
pub const EXAMPLE_ONE_LAMBDA: [f64; 6] = [0.5, 0.5, 0.5, 9.0 / 20.0, 9.0 / 20.0, 1.0 / 10.0];
/// Its printed `diag(ρ)`, three significant figures.
pub const EXAMPLE_ONE_DIAG: [f64; 8] = [0.0105, 0.242, 0.242, 0.0469, 0.201, 0.115, 0.115, 0.0274];

/// `diag(Λ)` of the instance that satisfies the bounds with `ℓ = υ = 1/20`.
pub const EXAMPLE_TWO_LAMBDA: [f64; 6] = [0.5, 0.5, 0.5, 1.0 / 20.0, 9.0 / 20.0, 1.0 / 10.0];
pub const EXAMPLE_TWO_DIAG: [f64; 8] = [0.0134, 0.227, 0.287, 0.0469, 0.234, 0.135, 0.0343, 0.0217];
/// Printed `K[i] ρ K[i]'` for the second instance.
pub const EXAMPLE_TWO_RESTORED: [f64; 6] = [0.50, 0.50, 0.50, 0.05, 0.45, 0.10];

/// Absolute tolerance for comparing against the printed diagonals.
pub const PRINTED_DIAG_TOL: f64 = 0.02;

/// Symmetric instance: every `P(Ā_i) = 1/2`, every `P(A_i A_j) = 1/4`.
pub const QUARTER_LAMBDA: [f64; 6] = [0.5, 0.5, 0.5, 0.25, 0.25, 0.25];
