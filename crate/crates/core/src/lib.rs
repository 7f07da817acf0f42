//! Stream-cipher laboratory: keystream generators, ciphers, a natural-language
//! obfuscation layer, classical attacks and a channel simulator.

pub mod channel;
pub mod cipher;
pub mod cryptanalysis;
pub mod data;
pub mod demo;
pub mod keystream;
pub mod nl;
