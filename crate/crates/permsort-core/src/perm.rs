//! Permutations in one-line notation, their symmetries and decompositions,
//! pattern containment, and the structural metrics used by the engine.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A permutation of `{1, ..., n}` in one-line notation.
///
/// Values are 1-based throughout: `at(i)` is the image of position `i` for
/// `1 <= i <= n`. The empty permutation (n = 0) is allowed; it shows up as
/// the pattern of an empty grid cell and as the neutral element of sums.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    vals: Vec<u16>,
}

impl Perm {
    /// Builds a permutation from 1-based values, checking it is a bijection
    /// on `{1, .., n}`.
    pub fn new(vals: Vec<u16>) -> Result<Self> {
        let n = vals.len();
        if n > u16::MAX as usize {
            return Err(Error::domain("permutation too long"));
        }
        let mut seen = vec![false; n];
        for &v in &vals {
            if v == 0 || v as usize > n {
                return Err(Error::domain(format!(
                    "value {v} out of range 1..={n} in one-line notation"
                )));
            }
            if seen[v as usize - 1] {
                return Err(Error::domain(format!("value {v} repeated")));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Perm { vals })
    }

    /// Internal constructor for values already known to form a permutation.
    pub(crate) fn from_vals_unchecked(vals: Vec<u16>) -> Self {
        debug_assert!(Perm::new(vals.clone()).is_ok());
        Perm { vals }
    }

    /// The identity permutation `(1, 2, ..., n)`.
    pub fn identity(n: usize) -> Self {
        Perm {
            vals: (1..=n as u16).collect(),
        }
    }

    /// The decreasing permutation `(n, n-1, ..., 1)`.
    pub fn decreasing(n: usize) -> Self {
        Perm {
            vals: (1..=n as u16).rev().collect(),
        }
    }

    /// The cyclic left shift by `s`: position `i` maps to `((s + i - 1) mod n) + 1`.
    /// Shift 0 is the identity; the `n` shifts form the rotation class level.
    pub fn cyclic_shift(n: usize, s: usize) -> Self {
        Perm {
            vals: (0..n).map(|i| ((s + i) % n) as u16 + 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Image of 1-based position `i`. Panics if `i` is out of range.
    pub fn at(&self, i: usize) -> usize {
        self.vals[i - 1] as usize
    }

    /// The underlying one-line values (1-based entries).
    pub fn values(&self) -> &[u16] {
        &self.vals
    }

    pub fn is_identity(&self) -> bool {
        self.vals
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    /// Composition `self ∘ other`: position `i` maps to `self(other(i))`.
    /// Both permutations must have the same size.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "composition requires equal sizes");
        Perm {
            vals: other
                .vals
                .iter()
                .map(|&v| self.vals[v as usize - 1])
                .collect(),
        }
    }

    /// The inverse permutation: `inverse().at(self.at(i)) == i`.
    pub fn inverse(&self) -> Perm {
        let mut vals = vec![0u16; self.len()];
        for (i, &v) in self.vals.iter().enumerate() {
            vals[v as usize - 1] = i as u16 + 1;
        }
        Perm { vals }
    }

    /// Reverse: reads the one-line notation right to left.
    pub fn reverse(&self) -> Perm {
        Perm {
            vals: self.vals.iter().rev().copied().collect(),
        }
    }

    /// Complement: value `v` becomes `n + 1 - v`.
    pub fn complement(&self) -> Perm {
        let n = self.len() as u16;
        Perm {
            vals: self.vals.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    /// Flip: `((π reversed) inverted) reversed`, the reflection along the
    /// anti-diagonal of the plot. An involution, like the other three.
    pub fn flip(&self) -> Perm {
        self.reverse().inverse().reverse()
    }

    /// Direct sum `self ⊕ other`: `other` is shifted above and after `self`.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let a = self.len() as u16;
        let mut vals = self.vals.clone();
        vals.extend(other.vals.iter().map(|&v| v + a));
        Perm { vals }
    }

    /// Skew sum `self ⊖ other`: `self` is shifted above and before `other`.
    pub fn skew_sum(&self, other: &Perm) -> Perm {
        let b = other.len() as u16;
        let mut vals: Vec<u16> = self.vals.iter().map(|&v| v + b).collect();
        vals.extend_from_slice(&other.vals);
        Perm { vals }
    }

    /// The finest decomposition `self = c_1 ⊕ c_2 ⊕ ... ⊕ c_k` into
    /// sum-indecomposable components. The empty permutation has no components.
    pub fn sum_components(&self) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut start = 0usize;
        let mut max_so_far = 0u16;
        for (i, &v) in self.vals.iter().enumerate() {
            max_so_far = max_so_far.max(v);
            if max_so_far as usize == i + 1 {
                let base = start as u16;
                out.push(Perm {
                    vals: self.vals[start..=i].iter().map(|&v| v - base).collect(),
                });
                start = i + 1;
            }
        }
        out
    }

    /// The finest decomposition into skew-indecomposable components
    /// (`self = c_1 ⊖ c_2 ⊖ ... ⊖ c_k`).
    pub fn skew_components(&self) -> Vec<Perm> {
        let n = self.len();
        let mut out = Vec::new();
        let mut start = 0usize;
        let mut min_so_far = u16::MAX;
        for (i, &v) in self.vals.iter().enumerate() {
            min_so_far = min_so_far.min(v);
            if min_so_far as usize == n - i {
                let base = (n - i - 1) as u16;
                out.push(Perm {
                    vals: self.vals[start..=i].iter().map(|&v| v - base).collect(),
                });
                start = i + 1;
                min_so_far = u16::MAX;
            }
        }
        out
    }

    /// Pattern containment: does some subsequence of `self` have the same
    /// relative order as `pattern`? Every permutation contains the empty one.
    pub fn contains(&self, pattern: &Perm) -> bool {
        let k = pattern.len();
        if k == 0 {
            return true;
        }
        if k > self.len() {
            return false;
        }
        // Depth-first embedding. chosen[j] = text value used for pattern
        // position j. A candidate value at position j must sit strictly
        // between the tightest already-chosen values below and above
        // pattern.vals[j].
        fn dfs(text: &[u16], pat: &[u16], chosen: &mut Vec<u16>, from: usize) -> bool {
            let j = chosen.len();
            if j == pat.len() {
                return true;
            }
            let remaining = pat.len() - j;
            let mut lo = 0u16;
            let mut hi = u16::MAX;
            for (jj, &c) in chosen.iter().enumerate() {
                if pat[jj] < pat[j] {
                    lo = lo.max(c);
                } else {
                    hi = hi.min(c);
                }
            }
            for i in from..=(text.len() - remaining) {
                let v = text[i];
                if v > lo && v < hi {
                    chosen.push(v);
                    if dfs(text, pat, chosen, i + 1) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        dfs(&self.vals, &pattern.vals, &mut Vec::with_capacity(k), 0)
    }

    pub fn avoids(&self, pattern: &Perm) -> bool {
        !self.contains(pattern)
    }

    /// Number of inversions: pairs `i < j` with `at(i) > at(j)`.
    pub fn inversions(&self) -> u64 {
        let mut count = 0u64;
        for i in 0..self.vals.len() {
            for j in i + 1..self.vals.len() {
                if self.vals[i] > self.vals[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Total cyclic distance: the sum of `cyclic_distance` over consecutive
    /// one-line entries, plus the wrap-around term between the last and the
    /// first entry. Equals `n` on the identity for `n >= 2`, and is invariant
    /// under composition with rotations and reversed rotations on either side.
    pub fn total_cyclic_distance(&self) -> u64 {
        let n = self.len();
        if n == 0 {
            return 0;
        }
        let mut total = cyclic_distance(self.at(1), self.at(n), n) as u64;
        for i in 1..n {
            total += cyclic_distance(self.at(i), self.at(i + 1), n) as u64;
        }
        total
    }

    /// Alternation shape of the plot, if any.
    ///
    /// The horizontal condition holds when all odd values appear before all
    /// even values, or all even values before all odd values. The vertical
    /// condition is the same property of the inverse (odd and even positions
    /// separated by value). A permutation satisfying both reports Horizontal.
    pub fn alternation(&self) -> Alternation {
        if horizontal_condition(self) {
            Alternation::Horizontal
        } else if horizontal_condition(&self.inverse()) {
            Alternation::Vertical
        } else {
            Alternation::Neither
        }
    }

    /// One-line text: compact digits for sizes up to 9, space-separated
    /// otherwise. Reparses to the same permutation.
    pub fn to_token(&self) -> String {
        if !self.is_empty() && self.len() <= 9 {
            self.vals.iter().map(|v| v.to_string()).collect()
        } else {
            self.to_string()
        }
    }
}

fn horizontal_condition(p: &Perm) -> bool {
    // Positions of odd values versus positions of even values.
    let mut max_odd = 0usize;
    let mut min_odd = usize::MAX;
    let mut max_even = 0usize;
    let mut min_even = usize::MAX;
    for i in 1..=p.len() {
        let v = p.at(i);
        if v % 2 == 1 {
            max_odd = max_odd.max(i);
            min_odd = min_odd.min(i);
        } else {
            max_even = max_even.max(i);
            min_even = min_even.min(i);
        }
    }
    if max_odd == 0 || max_even == 0 {
        return true; // one of the sides is empty
    }
    max_odd < min_even || max_even < min_odd
}

/// Alternation shape reported by [`Perm::alternation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternation {
    Horizontal,
    Vertical,
    Neither,
}

impl fmt::Display for Alternation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Alternation::Horizontal => "horizontal",
            Alternation::Vertical => "vertical",
            Alternation::Neither => "neither",
        };
        f.write_str(s)
    }
}

/// Distance between `i` and `j` on the cycle `1, 2, ..., n, 1`.
/// Both arguments must lie in `1..=n`.
pub fn cyclic_distance(i: usize, j: usize, n: usize) -> usize {
    assert!(i >= 1 && i <= n && j >= 1 && j <= n);
    let d = i.abs_diff(j);
    d.min(n - d)
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.vals {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

impl FromStr for Perm {
    type Err = Error;

    /// Accepts values separated by whitespace or commas, or a single token
    /// of digits read one value per digit (sizes up to 9): "2 4 1 3",
    /// "2,4,1,3" and "2413" all parse to the same permutation.
    fn from_str(s: &str) -> Result<Perm> {
        let tokens: Vec<&str> = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            return Err(Error::parse("empty permutation text"));
        }
        let vals: Vec<u16> = if tokens.len() == 1
            && tokens[0].len() > 1
            && tokens[0].bytes().all(|b| b.is_ascii_digit())
        {
            tokens[0].bytes().map(|b| (b - b'0') as u16).collect()
        } else {
            tokens
                .iter()
                .map(|t| {
                    t.parse::<u16>()
                        .map_err(|_| Error::parse(format!("bad value {t:?}")))
                })
                .collect::<Result<_>>()?
        };
        Perm::new(vals).map_err(|e| Error::parse(format!("invalid permutation {s:?}: {e}")))
    }
}

/// A finite set of points in general position: all x-coordinates distinct
/// and all y-coordinates distinct. Stored sorted by x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pts: Vec<(i64, i64)>,
}

impl PointSet {
    pub fn new(mut pts: Vec<(i64, i64)>) -> Result<Self> {
        pts.sort_unstable();
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::domain(format!(
                    "points share x-coordinate {}",
                    w[0].0
                )));
            }
        }
        let mut ys: Vec<i64> = pts.iter().map(|p| p.1).collect();
        ys.sort_unstable();
        for w in ys.windows(2) {
            if w[0] == w[1] {
                return Err(Error::domain(format!("points share y-coordinate {}", w[0])));
            }
        }
        Ok(PointSet { pts })
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.pts
    }

    /// The permutation realized by the point set: read points left to right
    /// and record the rank of each y-coordinate.
    pub fn pattern(&self) -> Perm {
        let mut ys: Vec<i64> = self.pts.iter().map(|p| p.1).collect();
        ys.sort_unstable();
        let vals = self
            .pts
            .iter()
            .map(|p| (ys.binary_search(&p.1).unwrap() + 1) as u16)
            .collect();
        Perm::from_vals_unchecked(vals)
    }

    /// Intervalicity: the larger of the two run counts of the coordinate
    /// projections, where the run count of a set of integers is the number
    /// of maximal blocks of consecutive values. Empty sets give 0.
    pub fn intervalicity(&self) -> usize {
        let xs: Vec<i64> = self.pts.iter().map(|p| p.0).collect();
        let mut ys: Vec<i64> = self.pts.iter().map(|p| p.1).collect();
        ys.sort_unstable();
        run_count(&xs).max(run_count(&ys))
    }
}

/// Number of maximal runs of consecutive integers in a sorted slice.
fn run_count(sorted: &[i64]) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    1 + sorted.windows(2).filter(|w| w[1] != w[0] + 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(Perm::new(vec![1, 2, 3]).is_ok());
        assert!(Perm::new(vec![]).is_ok());
        assert!(Perm::new(vec![2, 2, 1]).is_err());
        assert!(Perm::new(vec![0, 1]).is_err());
        assert!(Perm::new(vec![1, 3]).is_err());
    }

    #[test]
    fn parsing_forms_agree() {
        assert_eq!(p("2413"), p("2 4 1 3"));
        assert_eq!(p("2413"), p("2,4,1,3"));
        assert_eq!(p("2413"), Perm::new(vec![2, 4, 1, 3]).unwrap());
        assert_eq!(p("10 2 1 3 4 5 6 7 8 9").len(), 10);
        assert!("".parse::<Perm>().is_err());
        assert!("2 4 1".parse::<Perm>().is_err());
        assert!("7".parse::<Perm>().is_err()); // single value must be 1
        assert_eq!(p("1"), Perm::identity(1));
    }

    #[test]
    fn display_round_trips() {
        let q = p("2 4 1 3");
        assert_eq!(q.to_string(), "2 4 1 3");
        assert_eq!(q.to_token(), "2413");
        let big = Perm::decreasing(12);
        assert_eq!(big.to_token().parse::<Perm>().unwrap(), big);
    }

    // The permutation 2413 is fixed by no symmetry; all four basic images
    // coincide at 3142, its partner in the only symmetry class of simple
    // permutations of size 4.
    #[test]
    fn symmetries_of_2413() {
        let q = p("2413");
        assert_eq!(q.inverse(), p("3142"));
        assert_eq!(q.reverse(), p("3142"));
        assert_eq!(q.complement(), p("3142"));
        assert_eq!(q.flip(), p("3142"));
    }

    #[test]
    fn symmetries_are_involutions() {
        for s in ["2413", "54321", "1", "351624"] {
            let q = p(s);
            assert_eq!(q.inverse().inverse(), q);
            assert_eq!(q.reverse().reverse(), q);
            assert_eq!(q.complement().complement(), q);
            assert_eq!(q.flip().flip(), q);
        }
    }

    #[test]
    fn composition_matches_worked_example() {
        let sigma = p("3 1 2 4 5 9 6 7 8");
        let pi = p("3 8 1 6 2 5 9 4 7");
        assert_eq!(pi.compose(&sigma), p("1 3 8 6 2 7 5 9 4"));
    }

    #[test]
    fn composition_algebra() {
        let sigma = p("2413");
        let pi = p("3142");
        // (σ∘π)(i) = σ(π(i))
        assert_eq!(sigma.compose(&pi), p("1234"));
        assert_eq!(
            sigma.compose(&pi).inverse(),
            pi.inverse().compose(&sigma.inverse())
        );
        assert_eq!(sigma.compose(&pi).flip(), pi.flip().compose(&sigma.flip()));
        let id = Perm::identity(4);
        assert_eq!(sigma.compose(&id), sigma);
        assert_eq!(id.compose(&sigma), sigma);
        assert_eq!(sigma.inverse().compose(&sigma), id);
    }

    #[test]
    fn sums_and_components() {
        assert_eq!(p("12").skew_sum(&p("1")), p("231"));
        assert_eq!(p("21").direct_sum(&p("21")), p("2143"));
        assert_eq!(p("2143").sum_components(), vec![p("21"), p("21")]);
        assert_eq!(p("2413").sum_components(), vec![p("2413")]);
        assert_eq!(p("123").sum_components(), vec![p("1"), p("1"), p("1")]);
        assert_eq!(p("231").skew_components(), vec![p("12"), p("1")]);
        assert_eq!(p("132").skew_components(), vec![p("132")]);
        assert_eq!(p("321").skew_components(), vec![p("1"), p("1"), p("1")]);
        assert_eq!(p("3412").skew_components(), vec![p("12"), p("12")]);
        assert!(Perm::identity(0).sum_components().is_empty());
    }

    #[test]
    fn cyclic_shifts() {
        assert_eq!(Perm::cyclic_shift(5, 0), Perm::identity(5));
        assert_eq!(Perm::cyclic_shift(5, 2), p("34512"));
        assert_eq!(Perm::cyclic_shift(1, 0), p("1"));
    }

    #[test]
    fn containment() {
        assert!(p("2413").contains(&p("231")));
        assert!(p("2413").avoids(&p("321")));
        assert!(p("351624").contains(&p("2413")));
        assert!(p("123456").avoids(&p("21")));
        assert!(p("1").contains(&Perm::identity(0)));
        // Every permutation contains itself and all its one-point deletions.
        let q = p("35142");
        assert!(q.contains(&q));
        assert!(q.contains(&p("2413")) || q.contains(&p("3142")));
    }

    #[test]
    fn inversion_counts() {
        assert_eq!(Perm::identity(6).inversions(), 0);
        assert_eq!(Perm::decreasing(6).inversions(), 15);
        assert_eq!(p("2413").inversions(), 3);
    }

    #[test]
    fn cyclic_distance_values() {
        assert_eq!(cyclic_distance(1, 6, 6), 1);
        assert_eq!(cyclic_distance(2, 5, 6), 3);
        assert_eq!(cyclic_distance(4, 4, 9), 0);
        assert_eq!(cyclic_distance(1, 2, 2), 1);
    }

    #[test]
    fn total_cyclic_distance_values() {
        // Interleaving pattern on 6 points: wrap term cd(1,6)=1, then
        // 3+2+3+2+3 along the line.
        assert_eq!(p("142536").total_cyclic_distance(), 14);
        assert_eq!(p("2143").total_cyclic_distance(), 4);
        for n in 2..=12 {
            assert_eq!(Perm::identity(n).total_cyclic_distance(), n as u64);
        }
        assert_eq!(Perm::identity(1).total_cyclic_distance(), 0);
    }

    #[test]
    fn alternation_shapes() {
        // 2413 satisfies the horizontal condition outright (even values
        // occupy the first two positions), so the tie goes to Horizontal.
        assert_eq!(p("2413").alternation(), Alternation::Horizontal);
        // 2314 fails the horizontal condition but its inverse 3124 puts all
        // odd values first: vertical.
        assert_eq!(p("2314").alternation(), Alternation::Vertical);
        assert_eq!(Perm::identity(4).alternation(), Alternation::Neither);
        assert_eq!(p("1").alternation(), Alternation::Horizontal);
        assert_eq!(p("21").alternation(), Alternation::Horizontal);
        assert_eq!(p("2143").alternation(), Alternation::Neither);
    }

    #[test]
    fn point_sets() {
        let ps = PointSet::new(vec![(3, 2), (1, 1), (5, 3)]).unwrap();
        assert_eq!(ps.pattern(), p("123"));
        assert_eq!(ps.intervalicity(), 3);
        let grid = PointSet::new(vec![(1, 1), (2, 2), (3, 3)]).unwrap();
        assert_eq!(grid.intervalicity(), 1);
        let split = PointSet::new(vec![(1, 5), (2, 6), (10, 1), (11, 2)]).unwrap();
        assert_eq!(split.pattern(), p("3412"));
        assert_eq!(split.intervalicity(), 2);
        assert!(PointSet::new(vec![(1, 1), (1, 2)]).is_err());
        assert!(PointSet::new(vec![(1, 1), (2, 1)]).is_err());
        assert_eq!(PointSet::new(vec![]).unwrap().intervalicity(), 0);
    }
}
