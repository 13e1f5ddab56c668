//! Arithmetic for the first Grigorchuk group G₀ = ⟨a, b, c, d⟩ acting on the
//! rooted binary tree, including its Klein four-subgroup K = {1, b, c, d} and
//! a decision procedure for the word problem.
//!
//! The generators are involutions; `a` swaps the two depth-1 subtrees and
//! `b = (a, c)`, `c = (a, d)`, `d = (1, b)` act by their wreath sections.
//! Words multiply left-to-right as written but act right-to-left (the
//! rightmost letter is applied first), so `act(w1·w2, u) = act(w1, act(w2, u))`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cantor::Word;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Letter {
    fn char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
            Letter::D => 'd',
        }
    }

    /// Wreath section at a depth-1 vertex; None encodes the trivial section.
    fn section(self, vertex: u8) -> Option<Letter> {
        match (self, vertex) {
            (Letter::A, _) => None,
            (Letter::B, 0) => Some(Letter::A),
            (Letter::B, 1) => Some(Letter::C),
            (Letter::C, 0) => Some(Letter::A),
            (Letter::C, 1) => Some(Letter::D),
            (Letter::D, 0) => None,
            (Letter::D, 1) => Some(Letter::B),
            _ => unreachable!("vertex is 0 or 1"),
        }
    }
}

/// One of {1, b, c, d} with the Klein four-group multiplication.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum KElement {
    One,
    B,
    C,
    D,
}

impl KElement {
    pub const ALL: [KElement; 4] = [KElement::One, KElement::B, KElement::C, KElement::D];

    pub fn word(self) -> GrigWord {
        match self {
            KElement::One => GrigWord::identity(),
            KElement::B => GrigWord(vec![Letter::B]),
            KElement::C => GrigWord(vec![Letter::C]),
            KElement::D => GrigWord(vec![Letter::D]),
        }
    }
}

/// Klein four-group table: every element is an involution and the product of
/// two distinct non-identity elements is the third.
pub fn k_mul(x: KElement, y: KElement) -> KElement {
    use KElement::*;
    match (x, y) {
        (One, z) | (z, One) => z,
        (B, B) | (C, C) | (D, D) => One,
        (B, C) | (C, B) => D,
        (B, D) | (D, B) => C,
        (C, D) | (D, C) => B,
    }
}

/// A word over {a, b, c, d}; the group inverse is the reversed word because
/// every generator is an involution.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct GrigWord(Vec<Letter>);

impl GrigWord {
    pub fn identity() -> Self {
        GrigWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation; the product acts by `self` after `rhs`… as written:
    /// `(w1.mul(w2)).act(u) == w1.act(w2.act(u))`.
    pub fn mul(&self, rhs: &GrigWord) -> GrigWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&rhs.0);
        GrigWord(letters)
    }

    pub fn inverse(&self) -> GrigWord {
        GrigWord(self.0.iter().rev().copied().collect())
    }

    /// Stack-based reduction with a² = b² = c² = d² = 1 and the K table;
    /// the result alternates a's and K-letters.
    pub fn k_reduce(&self) -> GrigWord {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            push_reduced(&mut stack, l);
        }
        GrigWord(stack)
    }

    /// The wreath section of the whole word at a depth-1 vertex, reading
    /// letters right to left and tracking where the vertex currently sits.
    pub fn section(&self, vertex: u8) -> GrigWord {
        assert!(vertex <= 1);
        let mut cur = vertex;
        let mut out: Vec<Letter> = Vec::new();
        for &l in self.0.iter().rev() {
            match l {
                Letter::A => cur = 1 - cur,
                k => {
                    if let Some(s) = k.section(cur) {
                        out.push(s);
                    }
                }
            }
        }
        out.reverse();
        GrigWord(out)
    }

    /// Image of the finite word `u` under the tree automorphism (length
    /// preserved).
    pub fn act(&self, u: &Word) -> Word {
        let mut out = u.clone();
        for &l in self.0.iter().rev() {
            out = act_letter(l, &out);
        }
        out
    }

    /// True iff the word acts trivially on every finite word.  K-reduce,
    /// check the depth-1 action (an odd number of a's moves a depth-1
    /// vertex), then split into the two first-level sections and recurse;
    /// sections of an alternating word of length n ≥ 2 have length
    /// ≤ ⌈n/2⌉ < n, so the recursion terminates.
    pub fn is_identity(&self) -> bool {
        let reduced = self.k_reduce();
        is_identity_reduced(&reduced)
    }

    pub fn equal(&self, other: &GrigWord) -> bool {
        self.mul(&other.inverse()).is_identity()
    }

    /// The value in K, if the word lies in the Klein subgroup {1, b, c, d}.
    pub fn as_k(&self) -> Option<KElement> {
        KElement::ALL.into_iter().find(|k| self.equal(&k.word()))
    }

    /// The shortlex-least word equal to this one in G₀.  Sound as an
    /// equality-invariant key: the least equivalent word is no longer than
    /// any reduced representative, so a bounded search from either
    /// representative finds the same word.  Only alternating words are
    /// enumerated — any other word K-reduces to a strictly shorter one.
    pub fn canonical_form(&self) -> GrigWord {
        let reduced = self.k_reduce();
        if reduced.0.len() <= 1 {
            return reduced;
        }
        let memo = canon_memo().lock().expect("canon memo poisoned");
        if let Some(hit) = memo.get(&reduced.0) {
            return GrigWord(hit.clone());
        }
        drop(memo);
        // include the input's own length: equivalent words of equal minimal
        // length (e.g. adad and dada) must share a canonical form
        let mut found = reduced.clone();
        'search: for len in 0..=reduced.0.len() {
            for cand in alternating_words(len) {
                if cand.equal(&reduced) {
                    found = cand;
                    break 'search;
                }
            }
        }
        canon_memo()
            .lock()
            .expect("canon memo poisoned")
            .insert(reduced.0, found.0.clone());
        found
    }
}

fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    let Some(&top) = stack.last() else {
        stack.push(l);
        return;
    };
    match (top, l) {
        (Letter::A, Letter::A) => {
            stack.pop();
        }
        (Letter::A, _) | (_, Letter::A) => stack.push(l),
        (x, y) => {
            // two K-letters in a row: replace by their Klein product; the new
            // top may combine with what is now below it
            stack.pop();
            let prod = k_mul(letter_k(x), letter_k(y));
            match prod {
                KElement::One => {}
                KElement::B => push_reduced(stack, Letter::B),
                KElement::C => push_reduced(stack, Letter::C),
                KElement::D => push_reduced(stack, Letter::D),
            }
        }
    }
}

fn letter_k(l: Letter) -> KElement {
    match l {
        Letter::B => KElement::B,
        Letter::C => KElement::C,
        Letter::D => KElement::D,
        Letter::A => unreachable!("a is not in K"),
    }
}

fn act_letter(l: Letter, u: &Word) -> Word {
    if u.is_empty() {
        return u.clone();
    }
    let bits = u.bits();
    match l {
        Letter::A => {
            let mut out = bits.to_vec();
            out[0] = 1 - out[0];
            Word::from_bits(&out)
        }
        k => {
            let head = bits[0];
            let tail = Word::from_bits(&bits[1..]);
            let acted = match k.section(head) {
                Some(s) => act_letter(s, &tail),
                None => tail,
            };
            let mut out = vec![head];
            out.extend_from_slice(acted.bits());
            Word::from_bits(&out)
        }
    }
}

fn id_memo() -> &'static Mutex<HashMap<Vec<Letter>, bool>> {
    static MEMO: OnceLock<Mutex<HashMap<Vec<Letter>, bool>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn canon_memo() -> &'static Mutex<HashMap<Vec<Letter>, Vec<Letter>>> {
    static MEMO: OnceLock<Mutex<HashMap<Vec<Letter>, Vec<Letter>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn is_identity_reduced(reduced: &GrigWord) -> bool {
    match reduced.0.as_slice() {
        [] => return true,
        [_] => return false, // a, b, c, d all act nontrivially
        _ => {}
    }
    if let Some(&hit) = id_memo()
        .lock()
        .expect("identity memo poisoned")
        .get(&reduced.0)
    {
        return hit;
    }
    let odd_a = reduced.0.iter().filter(|&&l| l == Letter::A).count() % 2 == 1;
    let result = if odd_a {
        false
    } else {
        let s0 = reduced.section(0).k_reduce();
        let s1 = reduced.section(1).k_reduce();
        is_identity_reduced(&s0) && is_identity_reduced(&s1)
    };
    id_memo()
        .lock()
        .expect("identity memo poisoned")
        .insert(reduced.0.clone(), result);
    result
}

/// All alternating words of the given length (no aa and no adjacent
/// K-letters), in lexicographic order with a < b < c < d.
fn alternating_words(len: usize) -> Vec<GrigWord> {
    let mut out = Vec::new();
    let mut cur: Vec<Letter> = Vec::with_capacity(len);
    fn go(cur: &mut Vec<Letter>, len: usize, out: &mut Vec<GrigWord>) {
        if cur.len() == len {
            out.push(GrigWord(cur.clone()));
            return;
        }
        for l in [Letter::A, Letter::B, Letter::C, Letter::D] {
            if let Some(&prev) = cur.last() {
                let both_k = prev != Letter::A && l != Letter::A;
                let both_a = prev == Letter::A && l == Letter::A;
                if both_k || both_a {
                    continue;
                }
            }
            cur.push(l);
            go(cur, len, out);
            cur.pop();
        }
    }
    go(&mut cur, len, &mut out);
    out
}

impl fmt::Display for GrigWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.char())?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("a group word uses only the letters a, b, c, d (or 1 for the identity), got {0:?}")]
pub struct BadGrigWord(pub String);

impl FromStr for GrigWord {
    type Err = BadGrigWord;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                'a' => letters.push(Letter::A),
                'b' => letters.push(Letter::B),
                'c' => letters.push(Letter::C),
                'd' => letters.push(Letter::D),
                '1' => {} // identity marker contributes nothing
                _ => return Err(BadGrigWord(s.to_string())),
            }
        }
        Ok(GrigWord(letters))
    }
}

impl Serialize for GrigWord {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GrigWord {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Convenience constructor used all over the test-suite.
pub fn gw(s: &str) -> GrigWord {
    s.parse().expect("literal group word")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::w;

    #[test]
    fn generator_actions() {
        assert_eq!(gw("a").act(&w("011")), w("111"));
        assert_eq!(gw("d").act(&w("0110")), w("0110"));
        assert_eq!(gw("b").act(&w("01")), w("00"));
    }

    #[test]
    fn involutions_and_klein_products() {
        for s in ["aa", "bb", "cc", "dd", "bcd"] {
            assert!(gw(s).is_identity(), "{s} should be trivial");
        }
        for s in ["ab", "ac", "ad", "b", "c", "d", "a"] {
            assert!(!gw(s).is_identity(), "{s} should be nontrivial");
        }
        assert_eq!(k_mul(KElement::B, KElement::C), KElement::D);
        assert_eq!(k_mul(KElement::D, KElement::D), KElement::One);
        assert_eq!(k_mul(KElement::One, KElement::C), KElement::C);
    }

    #[test]
    fn equality_examples() {
        assert!(gw("bc").equal(&gw("d")));
        assert!(gw("a").equal(&gw("a")));
        assert!(!gw("ad").equal(&gw("da")));
    }

    #[test]
    fn sections_match_the_defining_recursion() {
        assert_eq!(gw("b").section(0), gw("a"));
        assert_eq!(gw("b").section(1), gw("c"));
        assert_eq!(gw("d").section(0), gw(""));
        assert_eq!(gw("d").section(1), gw("b"));
        // (g1·g2)|_δ = g1|_{g2 δ} · g2|_δ with g2 = a swapping the subtrees
        assert_eq!(gw("ba").section(0), gw("b").section(1));
    }

    #[test]
    fn ad_has_order_four() {
        let ad = gw("ad");
        let mut p = GrigWord::identity();
        for i in 1..=4 {
            p = p.mul(&ad);
            assert_eq!(p.is_identity(), i == 4, "(ad)^{i}");
        }
    }

    #[test]
    fn canonical_form_is_equality_invariant() {
        assert_eq!(gw("bc").canonical_form(), gw("d"));
        assert_eq!(gw("adadadad").canonical_form(), gw(""));
        assert_eq!(gw("ada").canonical_form(), gw("ada"));
        let x = gw("adad");
        let y = x.inverse(); // (ad)^2 = (da)^2 inverse, both reduce to the same key
        assert_eq!(x.canonical_form(), y.canonical_form());
    }

    #[test]
    fn serialization_round_trip_with_identity_marker() {
        assert_eq!(gw("1"), GrigWord::identity());
        assert_eq!(GrigWord::identity().to_string(), "1");
        assert_eq!(gw("abcd").to_string(), "abcd");
    }
}
