#![allow(dead_code)]

use charvar::poly::{parse_polynomial, TracePolynomial, TraceVariable};
use charvar::relations::GroupPresentation;
use charvar::words::FreeWord;

pub const FIGURE_EIGHT: [i32; 10] = [1, -2, -1, 2, 1, -2, 1, 2, -1, -2];
pub const WHITEHEAD: [i32; 16] = [1, 2, 1, -2, -1, -2, 1, 2, -1, -2, -1, 2, 1, 2, -1, -2];
pub const WEEKS_SNAPPY: &str = "Generators:\n   a,b\nRelators:\n   aabbaaBaB\n   aabbAbAbb\n";

/// Relations of the Weeks manifold in `x = t{1}`, `y = t{2}`, `z = t{1,2}`.
pub const WEEKS_RELATIONS: [&str; 6] = [
    "z^6 - 3z^5 + 2z^4 + 4z^3 - 12z^2 + 9z - 2",
    "-z^5 + 3z^4 + y z^3 - z^3 - y z^2 - 6z^2 - 3y z + 10z + 2y - 4",
    "z^5 - 3z^4 + 2z^3 + 5z^2 - 13z + y^3 - y^2 - 3y + 8",
    "x z^2 - y z^2 + x z - y z - x + y",
    "-2z^5 + 5z^4 - z^3 - 9z^2 - y^2 z - y z + 19z + x y^2 - x + x y - 8",
    "z^5 - 2z^4 + 4z^2 - x y z - 8z + x^2 + y^2",
];

pub fn xyz(s: &str) -> TracePolynomial {
    parse_polynomial(
        s,
        &[
            ("x", TraceVariable::single(1)),
            ("y", TraceVariable::single(2)),
            ("z", TraceVariable::pair(1, 2)),
        ],
    )
    .unwrap()
}

pub fn word(letters: &[i32], rank: u32) -> FreeWord {
    FreeWord::new(letters.to_vec(), rank).unwrap()
}

pub fn one_relator(letters: &[i32]) -> GroupPresentation {
    GroupPresentation::new(2, vec![word(letters, 2)]).unwrap()
}

/// The rank-4 relations, one per line, `#` lines skipped.
pub fn rank4_fixture() -> Vec<TracePolynomial> {
    include_str!("../fixtures/rank4_relations.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect()
}
