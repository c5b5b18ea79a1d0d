//! Finite group presentations: parsing, free reduction, relation matrices,
//! and abelianization invariants.
//!
//! The presentation grammar is `< gen (, gen)* | word (, word)* >` where a
//! word is a whitespace-separated sequence of letters `ident` or `ident^int`.
//! The identity word is written `1`, so every presentation the library prints
//! can be parsed back. Both the generator list and the relator list may be
//! empty.
//!
//! Group isomorphism is undecidable for finite presentations, so this module
//! certifies abelianization invariants only; consumers record that limitation
//! in their certificates.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::matrix::{self, IntegerMatrix, MatrixError};

/// One letter of a word: a generator index and a nonzero exponent.
pub type Letter = (usize, i64);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}` in relator")]
    UnknownGenerator(String),
    #[error("generator index {index} out of range for {count} generators")]
    BadIndex { index: usize, count: usize },
    #[error("integer overflow in exact computation")]
    Overflow,
}

impl From<MatrixError> for PresentationError {
    fn from(_: MatrixError) -> Self {
        PresentationError::Overflow
    }
}

/// A finite presentation: an ordered list of distinct generators and a list
/// of freely reduced relator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Vec<String>,
    relators: Vec<Vec<Letter>>,
}

impl GroupPresentation {
    pub fn new(
        generators: Vec<String>,
        relators: Vec<Vec<Letter>>,
    ) -> Result<Self, PresentationError> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].contains(g) {
                return Err(PresentationError::DuplicateGenerator(g.clone()));
            }
        }
        let count = generators.len();
        let relators = relators
            .into_iter()
            .map(|word| {
                for &(idx, _) in &word {
                    if idx >= count {
                        return Err(PresentationError::BadIndex { index: idx, count });
                    }
                }
                free_reduce(&word)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupPresentation {
            generators,
            relators,
        })
    }

    /// The presentation `<>` of the trivial group.
    pub fn trivial() -> Self {
        GroupPresentation {
            generators: Vec::new(),
            relators: Vec::new(),
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Vec<Letter>] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }
}

impl FromStr for GroupPresentation {
    type Err = PresentationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_presentation(s)
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}", self.generators.join(", "))?;
        if !self.relators.is_empty() {
            let words: Vec<String> = self.relators.iter().map(|w| self.word_to_string(w)).collect();
            write!(f, " | {}", words.join(", "))?;
        }
        write!(f, ">")
    }
}

impl GroupPresentation {
    fn word_to_string(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        word.iter()
            .map(|&(idx, exp)| {
                if exp == 1 {
                    self.generators[idx].clone()
                } else {
                    format!("{}^{}", self.generators[idx], exp)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The unique freely reduced form of a word: adjacent letters on the same
/// generator merge, zero exponents drop. Idempotent.
pub fn free_reduce(word: &[Letter]) -> Result<Vec<Letter>, PresentationError> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &(idx, exp) in word {
        if exp == 0 {
            continue;
        }
        match out.last_mut() {
            Some((top, top_exp)) if *top == idx => {
                let merged = top_exp
                    .checked_add(exp)
                    .ok_or(PresentationError::Overflow)?;
                if merged == 0 {
                    out.pop();
                } else {
                    *top_exp = merged;
                }
            }
            _ => out.push((idx, exp)),
        }
    }
    Ok(out)
}

/// The abelianized relator exponents: a `t x s` matrix whose `(j, i)` entry
/// is the total exponent of generator `i` in relator `j`.
pub fn relation_matrix(p: &GroupPresentation) -> IntegerMatrix {
    let s = p.generator_count();
    let t = p.relator_count();
    let mut entries = vec![0i128; t * s];
    for (j, word) in p.relators.iter().enumerate() {
        for &(idx, exp) in word {
            entries[j * s + idx] += i128::from(exp);
        }
    }
    IntegerMatrix::new(t, s, entries).expect("shape is consistent by construction")
}

/// Invariants of a finitely generated abelian group: `Z^free_rank` plus
/// cyclic factors `Z/d` with each `d` dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion_factors: Vec<i128>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion_factors.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Abelianization of the presented group, read off the Smith normal form of
/// the transposed relation matrix.
pub fn abelianization(p: &GroupPresentation) -> Result<AbelianInvariants, PresentationError> {
    let m = relation_matrix(p).transpose();
    let d = matrix::invariant_factors(&m)?;
    let nonzero = d.iter().filter(|x| **x != 0).count();
    let torsion_factors = d.into_iter().filter(|x| *x > 1).collect();
    Ok(AbelianInvariants {
        free_rank: p.generator_count() - nonzero,
        torsion_factors,
    })
}

/// Parse a presentation from the grammar described at module level.
/// Errors carry the byte offset of the offending token.
pub fn parse_presentation(text: &str) -> Result<GroupPresentation, PresentationError> {
    Parser::new(text).run()
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, PresentationError> {
        Err(PresentationError::Syntax {
            offset,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<(), PresentationError> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(self.pos, format!("expected `{}`", byte as char))
        }
    }

    fn ident(&mut self) -> Result<String, PresentationError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
            _ => return self.error(start, "expected identifier"),
        }
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn integer(&mut self) -> Result<i64, PresentationError> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if digits_start == self.pos {
            return self.error(start, "expected integer");
        }
        self.text[start..self.pos]
            .parse::<i64>()
            .map_err(|_| PresentationError::Syntax {
                offset: start,
                message: "exponent out of range".into(),
            })
    }

    fn run(&mut self) -> Result<GroupPresentation, PresentationError> {
        self.expect(b'<')?;
        let mut generators: Vec<String> = Vec::new();
        self.skip_ws();
        if !matches!(self.peek(), Some(b'|') | Some(b'>')) {
            loop {
                let name = self.ident()?;
                if generators.contains(&name) {
                    return Err(PresentationError::DuplicateGenerator(name));
                }
                generators.push(name);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    Some(b'|') | Some(b'>') => break,
                    _ => return self.error(self.pos, "expected `,`, `|` or `>`"),
                }
            }
        }
        let mut relators: Vec<Vec<Letter>> = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b'|') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() != Some(b'>') {
                loop {
                    relators.push(self.word(&generators)?);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b'>') => break,
                        _ => return self.error(self.pos, "expected `,` or `>`"),
                    }
                }
            }
        }
        self.expect(b'>')?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return self.error(self.pos, "trailing input after `>`");
        }
        GroupPresentation::new(generators, relators)
    }

    /// One relator: letters until `,` or `>`. The single token `1` denotes
    /// the identity word.
    fn word(&mut self, generators: &[String]) -> Result<Vec<Letter>, PresentationError> {
        self.skip_ws();
        if self.peek() == Some(b'1') {
            let after = self.bytes.get(self.pos + 1).copied();
            let terminates = !matches!(after, Some(b) if b.is_ascii_alphanumeric() || b == b'_');
            if terminates {
                self.pos += 1;
                self.skip_ws();
                if !matches!(self.peek(), Some(b',') | Some(b'>')) {
                    return self.error(self.pos, "identity word `1` stands alone");
                }
                return Ok(Vec::new());
            }
        }
        let mut letters: Vec<Letter> = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b',') | Some(b'>') | None => break,
                _ => {}
            }
            let name = self.ident()?;
            let index = generators
                .iter()
                .position(|g| *g == name)
                .ok_or(PresentationError::UnknownGenerator(name))?;
            let exp = if self.peek() == Some(b'^') {
                self.pos += 1;
                self.integer()?
            } else {
                1
            };
            letters.push((index, exp));
        }
        if letters.is_empty() {
            return self.error(self.pos, "empty relator (write `1` for the identity)");
        }
        Ok(letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> GroupPresentation {
        parse_presentation(s).unwrap()
    }

    #[test]
    fn parses_commutator_presentation() {
        let p = parse("<a, b | a b a^-1 b^-1>");
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relator_count(), 1);
        assert_eq!(p.relators()[0], vec![(0, 1), (1, 1), (0, -1), (1, -1)]);
    }

    #[test]
    fn parses_cyclic_presentation() {
        let p = parse("<a | a^5>");
        assert_eq!(p.generator_count(), 1);
        assert_eq!(p.relators()[0], vec![(0, 5)]);
    }

    #[test]
    fn relator_reduces_to_empty_word() {
        let p = parse("<a | a a^-1>");
        assert_eq!(p.relator_count(), 1);
        assert!(p.relators()[0].is_empty());
        assert_eq!(p.to_string(), "<a | 1>");
    }

    #[test]
    fn empty_presentations() {
        assert_eq!(parse("<>").generator_count(), 0);
        assert_eq!(parse("< | >").relator_count(), 0);
        assert_eq!(parse("<a>").relator_count(), 0);
        assert_eq!(parse("<a |>").relator_count(), 0);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_presentation("a, b>") {
            Err(PresentationError::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_presentation("<a | b>") {
            Err(PresentationError::UnknownGenerator(g)) => assert_eq!(g, "b"),
            other => panic!("expected unknown generator, got {other:?}"),
        }
        match parse_presentation("<a, a>") {
            Err(PresentationError::DuplicateGenerator(g)) => assert_eq!(g, "a"),
            other => panic!("expected duplicate generator, got {other:?}"),
        }
        assert!(parse_presentation("<a | , a>").is_err());
        assert!(parse_presentation("<a | a> junk").is_err());
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(free_reduce(&[(0, 2), (0, -2)]).unwrap(), vec![]);
        assert_eq!(
            free_reduce(&[(0, 1), (1, 1), (1, -1), (0, 3)]).unwrap(),
            vec![(0, 4)]
        );
    }

    #[test]
    fn relation_matrix_examples() {
        let commutator = parse("<a, b | a b a^-1 b^-1>");
        assert_eq!(relation_matrix(&commutator).entries(), &[0, 0]);
        let cyclic = parse("<a | a^5>");
        assert_eq!(relation_matrix(&cyclic).entries(), &[5]);
        let trefoil = parse("<a, b | a^2 b^-3>");
        assert_eq!(relation_matrix(&trefoil).entries(), &[2, -3]);
    }

    #[test]
    fn abelianization_examples() {
        let free_abelian = abelianization(&parse("<a, b | a b a^-1 b^-1>")).unwrap();
        assert_eq!(free_abelian.free_rank, 2);
        assert!(free_abelian.torsion_factors.is_empty());

        let cyclic = abelianization(&parse("<a | a^5>")).unwrap();
        assert_eq!(cyclic.free_rank, 0);
        assert_eq!(cyclic.torsion_factors, vec![5]);

        let trefoil = abelianization(&parse("<a, b | a^2 b^-3>")).unwrap();
        assert_eq!(trefoil.free_rank, 1);
        assert!(trefoil.torsion_factors.is_empty());
    }

    #[test]
    fn display_is_canonical() {
        let p = parse("<a,b|a b a^-1 b^-1, a^2>");
        assert_eq!(p.to_string(), "<a, b | a b a^-1 b^-1, a^2>");
        assert_eq!(parse("<>").to_string(), "<>");
        assert_eq!(parse("< | 1>").to_string(), "< | 1>");
    }

    fn arb_word(gens: usize) -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec((0..gens, -4i64..=4), 0..10)
    }

    proptest! {
        #[test]
        fn free_reduce_is_idempotent(w in arb_word(3)) {
            let once = free_reduce(&w).unwrap();
            let twice = free_reduce(&once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn reduced_words_have_no_adjacent_letters(w in arb_word(3)) {
            let reduced = free_reduce(&w).unwrap();
            for pair in reduced.windows(2) {
                prop_assert_ne!(pair[0].0, pair[1].0);
            }
            for (_, exp) in reduced {
                prop_assert_ne!(exp, 0);
            }
        }

        #[test]
        fn parse_print_parse_round_trips(words in proptest::collection::vec(arb_word(3), 0..4)) {
            let gens = vec!["a".to_string(), "b".to_string(), "c".to_string()];
            let p = GroupPresentation::new(gens, words).unwrap();
            let reparsed = parse_presentation(&p.to_string()).unwrap();
            prop_assert_eq!(p, reparsed);
        }

        /// Tietze moves that do not change the abelianization: permuting
        /// relators, inverting a relator, conjugating a relator.
        #[test]
        fn abelianization_stable_under_tietze_moves(
            words in proptest::collection::vec(arb_word(3), 1..4),
            pick in 0usize..4,
            conjugator in (0usize..3, -2i64..=2),
        ) {
            let gens = vec!["a".to_string(), "b".to_string(), "c".to_string()];
            let p = GroupPresentation::new(gens.clone(), words.clone()).unwrap();
            let base = abelianization(&p).unwrap();

            let mut permuted = words.clone();
            let shift = pick % permuted.len().max(1);
            permuted.rotate_left(shift);
            let p2 = GroupPresentation::new(gens.clone(), permuted).unwrap();
            prop_assert_eq!(&abelianization(&p2).unwrap(), &base);

            let mut inverted = words.clone();
            let target = pick % inverted.len();
            inverted[target] = inverted[target]
                .iter()
                .rev()
                .map(|&(i, e)| (i, -e))
                .collect();
            let p3 = GroupPresentation::new(gens.clone(), inverted).unwrap();
            prop_assert_eq!(&abelianization(&p3).unwrap(), &base);

            let mut conjugated = words;
            let (cg, ce) = conjugator;
            if ce != 0 {
                let target = pick % conjugated.len();
                let mut w = vec![(cg, ce)];
                w.extend(conjugated[target].iter().copied());
                w.push((cg, -ce));
                conjugated[target] = w;
            }
            let p4 = GroupPresentation::new(gens, conjugated).unwrap();
            prop_assert_eq!(&abelianization(&p4).unwrap(), &base);
        }
    }
}
