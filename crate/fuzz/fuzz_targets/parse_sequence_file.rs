#![no_main]

use libfuzzer_sys::fuzz_target;
use stochprod::seqfile::SequenceFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = SequenceFile::parse(text) {
        assert!(!file.records.is_empty());
        assert!(file.records.iter().all(|r| r.len() == file.n * file.n));
        // rendering must parse back to the same file
        let rendered = file.to_string();
        assert_eq!(SequenceFile::parse(&rendered).as_ref(), Ok(&file));
    }
});
