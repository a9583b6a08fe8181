//! Matrices shared by the integration tests.

#![allow(dead_code)]

pub const PCM_A_JSON: &str = r#"{"labels":["a","b","c","d","e","f"],"matrix":[
["1","1","1","1/2","1/2","1"],
["1","1","1/3","1/2","1/2","1"],
["1","3","1","1/2","1/2","1/2"],
["2","2","2","1","1","7"],
["2","2","2","1","1","5"],
["1","1","2","1/7","1/5","1"]]}"#;

pub const PCM_B_JSON: &str = r#"{"matrix":[
["1","9","6","1/3","2","1/2"],
["1/9","1","1/5","1/9","1/9","1/9"],
["1/6","5","1","1/2","1/3","1/5"],
["3","9","2","1","1/2","1/2"],
["1/2","9","3","2","1","1/2"],
["2","9","5","2","2","1"]]}"#;

/// Weights 1, 2, 4, 8: every triad agrees with the whole matrix.
pub const CONSISTENT_4: &str = "1,1/2,1/4,1/8\n2,1,1/2,1/4\n4,2,1,1/2\n8,4,2,1\n";

/// Uniform random draw from the scale, far from consistent.
pub const INCONSISTENT_7: &str = "1,9,1/9,9,1/9,9,1/9\n1/9,1,9,1/9,9,1/9,9\n9,1/9,1,9,1/9,9,1/9\n1/9,9,1/9,1,9,1/9,9\n9,1/9,9,1/9,1,9,1/9\n1/9,9,1/9,9,1/9,1,9\n9,1/9,9,1/9,9,1/9,1\n";
