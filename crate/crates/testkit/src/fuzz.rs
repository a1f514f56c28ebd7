//! Input mutation for parser fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

/// Fragments that tend to push the lexer and parser into odd states.
const TOKENS: &[&str] = &[
    "pattern",
    "compose",
    "goalset",
    "bundle",
    "{",
    "}",
    "[",
    "]",
    "..",
    "<-",
    "\"",
    "\\",
    "@",
    "//",
    "/*",
    "*/",
    "seq",
    "alt",
    "opt",
    "rep",
    "ref",
    "wire",
    "param",
    "\n",
    "é",
    "\u{0}",
    "9999999999999999999999",
    "-",
];

pub const MAX_LEN: usize = 4096;

/// Applies a few random byte and token edits to `base`, then truncates to
/// `MAX_LEN` bytes and repairs to UTF-8.
pub fn mutate<R: Rng>(rng: &mut R, base: &str) -> String {
    let mut bytes = base.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..8) {
        let at = if bytes.is_empty() { 0 } else { rng.gen_range(0..=bytes.len()) };
        match rng.gen_range(0..5) {
            0 if !bytes.is_empty() => {
                let end = (at + rng.gen_range(1..16)).min(bytes.len());
                bytes.drain(at.min(end)..end);
            }
            1 => {
                let tok = TOKENS.choose(rng).expect("non-empty");
                bytes.splice(at..at, tok.bytes());
            }
            2 if at < bytes.len() => bytes[at] = rng.gen(),
            3 if !bytes.is_empty() => {
                let from = rng.gen_range(0..bytes.len());
                let end = (from + rng.gen_range(1..64)).min(bytes.len());
                let chunk: Vec<u8> = bytes[from..end].to_vec();
                bytes.splice(at..at, chunk);
            }
            _ => {
                let n = rng.gen_range(1..8);
                let junk: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
                bytes.splice(at..at, junk);
            }
        }
    }
    bytes.truncate(MAX_LEN);
    String::from_utf8_lossy(&bytes).into_owned()
}

/// Random bytes with no relation to the grammar.
pub fn noise<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(0..512);
    let bytes: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
    String::from_utf8_lossy(&bytes).into_owned()
}
