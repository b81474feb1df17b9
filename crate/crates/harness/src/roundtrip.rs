//! Parser round-trip checks shared by the fuzz targets and the corpus test.
//!
//! Each check accepts arbitrary bytes, ignores input its parser rejects and
//! panics if accepted input does not survive a serialize/parse cycle.

use eulersim::graph::{parse_encoding, parse_instance, serialize_encoding, serialize_instance};
use eulersim::optics::{encode_raw_image, parse_raw_image};

use crate::config::ExperimentConfig;

pub fn check_instance(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(inst) = parse_instance(text) else { return };
    let once = serialize_instance(&inst);
    let back = parse_instance(&once).expect("serialized instance parses");
    assert_eq!(back.n(), inst.n());
    assert_eq!(serialize_instance(&back), once);
}

pub fn check_encoding(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(enc) = parse_encoding(text) else { return };
    let once = serialize_encoding(&enc);
    let back = parse_encoding(&once).expect("serialized encoding parses");
    assert_eq!(back.n(), enc.n());
    assert_eq!(serialize_encoding(&back), once);
}

pub fn check_config(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::from_toml(text) else { return };
    let once = cfg.to_toml();
    let back = ExperimentConfig::from_toml(&once).expect("serialized config parses");
    assert_eq!(back.to_toml(), once);
    assert_eq!(back.hash(), cfg.hash());
    let _ = cfg.validate();
}

pub fn check_raw_image(data: &[u8]) {
    let Ok(image) = parse_raw_image(data) else { return };
    assert_eq!(encode_raw_image(&image), data);
}
