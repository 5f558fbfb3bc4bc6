#![allow(dead_code)]

pub mod truth_table;
