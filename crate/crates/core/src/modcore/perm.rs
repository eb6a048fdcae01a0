use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `m` points.
///
/// Points are 0-based in the API that takes `usize` indices; the cycle
/// notation used by `Display` and `FromStr` is 1-based, e.g. `(1 3)(2 4)`.
/// Composition is function composition: `a.compose(&b)` applies `b` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(m: usize) -> Self {
        Self {
            images: (0..m).collect(),
        }
    }

    /// From 0-based images `i -> images[i]`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// From 1-based cycles on `m` points.
    pub fn from_cycles(m: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..m).collect();
        let mut touched = vec![false; m];
        for cycle in cycles {
            for (idx, &a) in cycle.iter().enumerate() {
                if a == 0 || a > m || touched[a - 1] {
                    return Err(Error::InvalidPermutation(format!(
                        "bad cycle {cycle:?} on {m} points"
                    )));
                }
                touched[a - 1] = true;
                let b = cycle[(idx + 1) % cycle.len()];
                if b == 0 || b > m {
                    return Err(Error::InvalidPermutation(format!(
                        "bad cycle {cycle:?} on {m} points"
                    )));
                }
                images[a - 1] = b - 1;
            }
        }
        Self::from_images(images)
    }

    /// Transposition of the 1-based points `a` and `b`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Self> {
        Self::from_cycles(m, &[&[a, b]])
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(
            self.size(),
            other.size(),
            "composing permutations of different sizes"
        );
        Perm {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.size()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Perm { images }
    }

    /// Extends by fixed points up to `m` points.
    pub fn extend(&self, m: usize) -> Perm {
        assert!(m >= self.size());
        let mut images = self.images.clone();
        images.extend(self.size()..m);
        Perm { images }
    }

    /// Restricts to the first `m` points, which must be mapped among themselves.
    pub fn restrict(&self, m: usize) -> Option<Perm> {
        if self.images[..m].iter().any(|&x| x >= m) {
            return None;
        }
        Some(Perm {
            images: self.images[..m].to_vec(),
        })
    }

    /// Next permutation in lexicographic order of the image sequence.
    pub fn next_lex(&self) -> Option<Perm> {
        let mut v = self.images.clone();
        let n = v.len();
        if n < 2 {
            return None;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        Some(Perm { images: v })
    }

    /// All permutations of `m` points, in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = Perm> {
        std::iter::successors(Some(Perm::identity(m)), Perm::next_lex)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        for start in 0..self.size() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Parses cycle notation on a given number of points.
pub fn parse_cycles(m: usize, s: &str) -> Result<Perm> {
    let s = s.trim();
    if s.is_empty() || s == "()" || s == "id" {
        return Ok(Perm::identity(m));
    }
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for chunk in s.split(')') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let body = chunk
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("bad cycle notation {s:?}")))?;
        let cycle = body
            .split([' ', ','])
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        cycles.push(cycle);
    }
    let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
    Perm::from_cycles(m, &refs)
}

impl FromStr for Perm {
    type Err = Error;

    /// Parses cycle notation; the size is the largest point mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let m = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        parse_cycles(m, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_applies_right_factor_first() {
        let a = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[&[2, 3]]).unwrap();
        // (1 2)∘(2 3): 2 -> 3 -> 3, 3 -> 2 -> 1, 1 -> 1 -> 2
        assert_eq!(a.compose(&b).to_string(), "(1 2 3)");
        assert_eq!(b.compose(&a).to_string(), "(1 3 2)");
    }

    #[test]
    fn lex_enumeration_counts() {
        assert_eq!(Perm::all(0).count(), 1);
        assert_eq!(Perm::all(1).count(), 1);
        assert_eq!(Perm::all(4).count(), 24);
        let v: Vec<_> = Perm::all(3).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cycle_round_trip() {
        for p in Perm::all(5) {
            let s = p.to_string();
            assert_eq!(parse_cycles(5, &s).unwrap(), p, "{s}");
            assert_eq!(p.compose(&p.inverse()), Perm::identity(5));
        }
        assert_eq!("(1 3)(2 4)".parse::<Perm>().unwrap().size(), 4);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_cycles(3, &[&[1, 4]]).is_err());
        assert!(Perm::from_cycles(3, &[&[1, 2], &[2, 3]]).is_err());
        assert!(parse_cycles(3, "(1 2").is_ok());
        assert!(parse_cycles(3, "1 2)").is_err());
    }
}
