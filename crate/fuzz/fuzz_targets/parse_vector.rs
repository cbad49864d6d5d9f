#![no_main]

use libfuzzer_sys::fuzz_target;
use stochprod::seqfile::parse_vector;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_vector(text) {
        assert!(!x.is_empty());
        assert!(x.iter().all(|v| v.is_finite()));
        let joined = x.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_vector(&joined).unwrap(), x);
    }
});
