#![no_main]

use libfuzzer_sys::fuzz_target;
use stochprod::convergence::{contraction_certificate, seminorm_trajectory, CertifyOptions};
use stochprod::hypotheses::{analyze, AnalysisOptions, PositivityStarts};
use stochprod::seqfile::SequenceFile;
use stochprod::stochastic::Tolerances;

// Parse, validate, analyze and certify small inputs; only the library's
// own errors may come back.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = SequenceFile::parse(text) else {
        return;
    };
    if file.n > 6 || file.records.len() > 32 {
        return;
    }
    let Ok(seq) = file.to_sequence(&Tolerances::default()) else {
        return;
    };
    let opts = AnalysisOptions {
        tol_pos: 0.0,
        starts: PositivityStarts::All,
    };
    let report = analyze(&seq, &opts).expect("validated input analyzes");
    let trajectory = seminorm_trajectory(&seq);
    assert!(trajectory.iter().all(|s| (0.0..=1.0).contains(s)));
    if let Ok(Some(cert)) = contraction_certificate(&seq, &CertifyOptions::default()) {
        assert!(report.verdict.violations().iter().all(|v| v.is_horizon_limited()));
        assert!(cert.measured_seminorm <= cert.contraction() + 1e-12);
    }
});
