#![allow(dead_code, clippy::approx_constant)]

pub mod corpus;
pub mod oracles;

use std::f64::consts::PI;

use excard::estimation::Sample;

pub fn wind_sample() -> Sample {
    Sample::new(corpus::WIND_DEGREES.iter().map(|d| d * PI / 180.0).collect()).unwrap()
}
