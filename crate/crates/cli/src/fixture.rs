//! Embedded example datasets.

/// Active repair times (hours) for an airborne communication transceiver;
/// 45 observations, strongly right-skewed.
pub const REPAIR_TIMES: [f64; 45] = [
    0.2, 0.3, 0.5, 0.5, 0.5, 0.5, 0.6, 0.6, 0.7, 0.7, 0.7, 0.8, //
    0.8, 1.0, 1.0, 1.0, 1.0, 1.1, 1.3, 1.5, 1.5, 1.5, 1.5, 2.0, //
    2.0, 2.2, 2.5, 3.0, 3.0, 3.3, 3.3, 4.0, 4.0, 4.5, 4.7, 5.0, //
    5.4, 5.4, 7.0, 7.5, 8.8, 9.0, 10.3, 22.0, 24.5,
];

/// Look up an embedded dataset by CLI name.
pub fn by_name(name: &str) -> Option<&'static [f64]> {
    match name {
        "repair-times" => Some(&REPAIR_TIMES),
        _ => None,
    }
}
