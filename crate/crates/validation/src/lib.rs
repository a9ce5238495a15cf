//! Reference values and sampling constants shared by the acceptance suite.

/// Reference peak table: period label, frequency (cycles/day), power,
/// amplitude and phase (degrees), as printed with their rounding.
pub const REFERENCE_PEAKS: [(&str, f64, &str, &str, f64); 6] = [
    ("7.3 d", 0.137, "0.000251", "0.0159", 35.6),
    ("5.5 d", 0.183, "0.000210", "0.0145", -163.6),
    ("30.9 h", 0.777, "0.000224", "0.0150", 9.8),
    ("21.0 h", 1.14, "0.000271", "0.0165", 106.7),
    ("9.6 h", 2.51, "0.000229", "0.0151", -50.6),
    ("8.6 h", 2.79, "0.000207", "0.0144", 4.1),
];
pub const REFERENCE_SD_AVG: f64 = 0.0829;
/// Probe grid: 8 slots per day over 702 slots, segment length 175.
pub const PROBE_FS: f64 = 8.0;
pub const PROBE_N: usize = 702;
pub const PROBE_DF: f64 = PROBE_FS / 175.0;

