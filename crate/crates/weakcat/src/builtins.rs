//! Scenario-file versions of the built-in scenarios.

use weakcat_core::scenarios::{builtin, Interpretation, Scenario, BUILTIN_NAMES};

use crate::sdl::{parse, serialize};

pub const SOURCES: [(&str, &str); 4] = [
    ("helicity-sign", include_str!("../builtins/helicity-sign.sdl")),
    ("helicity-preserving", include_str!("../builtins/helicity-preserving.sdl")),
    ("helicity-reversing", include_str!("../builtins/helicity-reversing.sdl")),
    ("cheshire-cat", include_str!("../builtins/cheshire-cat.sdl")),
];

pub fn is_builtin(name: &str) -> bool {
    BUILTIN_NAMES.contains(&name)
}

/// The annotated source file of a built-in.
pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Canonical (serialized) text of a built-in.
pub fn canonical_source(name: &str) -> Option<String> {
    let doc = parse(source(name)?).expect("built-in sources parse");
    Some(serialize(&doc))
}

pub fn scenario(name: &str, interpretation: Interpretation) -> Option<Scenario> {
    builtin(name, interpretation)
}
