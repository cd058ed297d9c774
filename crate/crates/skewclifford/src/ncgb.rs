//! Degree-truncated two-sided noncommutative Groebner bases under deglex,
//! normal-form reduction, normal-word counting (Hilbert functions) and a
//! growth classifier over truncated Hilbert data.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::freealg::{FreePoly, Presentation, Word};
use crate::scalars::{FieldSpec, Scalar};

/// Deglex with a configurable generator precedence. `precedence[i]` is the
/// rank of generator i; lower rank compares smaller. Default precedence is
/// declaration order (earlier = smaller).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOrder {
    pub precedence: Vec<usize>,
}

impl TermOrder {
    pub fn deglex(ngens: usize) -> Self {
        TermOrder {
            precedence: (0..ngens).collect(),
        }
    }

    /// Precedence given as the permutation of generator indices from
    /// smallest to largest.
    pub fn with_precedence(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut rank = vec![usize::MAX; n];
        for (r, &g) in perm.iter().enumerate() {
            if g >= n || rank[g] != usize::MAX {
                return Err(Error::Validation(format!(
                    "precedence must be a permutation of 0..{n}"
                )));
            }
            rank[g] = r;
        }
        Ok(TermOrder { precedence: rank })
    }

    pub fn cmp_words(&self, a: &Word, b: &Word) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            for (x, y) in a.letters.iter().zip(&b.letters) {
                match self.precedence[*x].cmp(&self.precedence[*y]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    pub fn leading_word<'a>(&self, f: &'a FreePoly) -> Option<&'a Word> {
        f.terms.keys().max_by(|a, b| self.cmp_words(a, b))
    }
}

/// Which divisible term / occurrence the reducer rewrites first. Both
/// strategies must agree on every normal form (confluence); tests exploit
/// this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// A truncated two-sided Groebner basis: monic, inter-reduced elements whose
/// overlap ambiguities all resolve up to `complete_up_to`.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub elements: Vec<FreePoly>,
    pub leading: Vec<Word>,
    pub order: TermOrder,
    pub truncation_degree: usize,
    pub complete_up_to: usize,
    pub ngens: usize,
    pub field: FieldSpec,
    pub gen_names: Vec<String>,
}

impl GroebnerBasis {
    /// Text serialization: a header line with order, precedence and
    /// truncation, then one element per line.
    pub fn to_text(&self) -> String {
        let prec: Vec<String> = {
            // precedence as the permutation smallest..largest, 1-based
            let mut idx: Vec<usize> = (0..self.ngens).collect();
            idx.sort_by_key(|&g| self.order.precedence[g]);
            idx.iter().map(|g| (g + 1).to_string()).collect()
        };
        let mut out = format!(
            "order=deglex precedence={} truncation={}\n",
            prec.join(","),
            self.complete_up_to
        );
        for e in &self.elements {
            out.push_str(&e.to_text(&self.gen_names));
            out.push('\n');
        }
        out
    }
}

fn make_monic(f: &FreePoly, order: &TermOrder) -> Result<FreePoly> {
    let lw = order.leading_word(f).cloned().expect("nonzero");
    let lc = f.terms.get(&lw).unwrap().clone();
    f.scale(&lc.inv()?)
}

fn reduce_with(
    f: &FreePoly,
    elements: &[FreePoly],
    leading: &[Word],
    order: &TermOrder,
    strategy: Strategy,
) -> Result<FreePoly> {
    let mut cur = f.clone();
    'outer: loop {
        // terms scanned from the largest word down (leftmost) or smallest up
        let words: Vec<Word> = match strategy {
            Strategy::Leftmost => {
                let mut w: Vec<Word> = cur.terms.keys().cloned().collect();
                w.sort_by(|a, b| order.cmp_words(b, a));
                w
            }
            Strategy::Rightmost => {
                let mut w: Vec<Word> = cur.terms.keys().cloned().collect();
                w.sort_by(|a, b| order.cmp_words(a, b));
                w
            }
        };
        for w in words {
            for (gi, lw) in leading.iter().enumerate() {
                if let Some(pos) = w.find_subword(lw) {
                    let c = cur.terms.get(&w).unwrap().clone();
                    let u = Word::new(w.letters[..pos].to_vec());
                    let v = Word::new(w.letters[pos + lw.len()..].to_vec());
                    let upoly = FreePoly::monomial(cur.ngens, u, c);
                    let vpoly = FreePoly::monomial(cur.ngens, v, cur.field.one());
                    let sub = upoly.mul(&elements[gi])?.mul(&vpoly)?;
                    cur = cur.sub(&sub)?;
                    continue 'outer;
                }
            }
        }
        return Ok(cur);
    }
}

/// Normal form of `f` modulo the basis; unique within the certified bound.
pub fn normal_form(f: &FreePoly, gb: &GroebnerBasis) -> Result<FreePoly> {
    normal_form_with(f, gb, Strategy::Leftmost)
}

pub fn normal_form_with(f: &FreePoly, gb: &GroebnerBasis, strategy: Strategy) -> Result<FreePoly> {
    let degree = f.max_word_len();
    if degree > gb.complete_up_to {
        return Err(Error::DegreeExceedsTruncation {
            degree,
            bound: gb.complete_up_to,
        });
    }
    reduce_with(f, &gb.elements, &gb.leading, &gb.order, strategy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ambiguity {
    // lw_i suffix of length k equals lw_j prefix
    Overlap { i: usize, j: usize, k: usize },
    // lw_i occurs inside lw_j at pos
    Inclusion { i: usize, j: usize, pos: usize },
}

fn ambiguities(i: usize, j: usize, lwi: &Word, lwj: &Word, bound: usize) -> Vec<(usize, Ambiguity)> {
    let mut out = Vec::new();
    let (li, lj) = (lwi.len(), lwj.len());
    for k in 1..li.min(lj) {
        if lwi.letters[li - k..] == lwj.letters[..k] {
            let deg = li + lj - k;
            if deg <= bound {
                out.push((deg, Ambiguity::Overlap { i, j, k }));
            }
        }
    }
    if i != j && li < lj && lj <= bound {
        let mut pos = 0;
        while pos + li <= lj {
            if lwj.letters[pos..pos + li] == lwi.letters[..] {
                out.push((lj, Ambiguity::Inclusion { i, j, pos }));
            }
            pos += 1;
        }
    }
    out
}

fn s_poly(
    amb: &Ambiguity,
    elements: &[FreePoly],
    leading: &[Word],
    field: FieldSpec,
    ngens: usize,
) -> Result<FreePoly> {
    match *amb {
        Ambiguity::Overlap { i, j, k } => {
            let lwi = &leading[i];
            let lwj = &leading[j];
            let right = FreePoly::monomial(
                ngens,
                Word::new(lwj.letters[k..].to_vec()),
                field.one(),
            );
            let left = FreePoly::monomial(
                ngens,
                Word::new(lwi.letters[..lwi.len() - k].to_vec()),
                field.one(),
            );
            elements[i].mul(&right)?.sub(&left.mul(&elements[j])?)
        }
        Ambiguity::Inclusion { i, j, pos } => {
            let lwi = &leading[i];
            let lwj = &leading[j];
            let left = FreePoly::monomial(ngens, Word::new(lwj.letters[..pos].to_vec()), field.one());
            let right = FreePoly::monomial(
                ngens,
                Word::new(lwj.letters[pos + lwi.len()..].to_vec()),
                field.one(),
            );
            left.mul(&elements[i])?.mul(&right)?.sub(&elements[j])
        }
    }
}

/// Diamond-lemma completion of a homogeneous presentation up to degree `n`.
/// The ambiguity queue is processed in (degree, creation order) priority.
pub fn complete(p: &Presentation, n: usize, order: TermOrder) -> Result<GroebnerBasis> {
    if p.gen_degrees.iter().any(|&d| d != 1) {
        return Err(Error::DegreeOneGeneratorsRequired);
    }
    for r in &p.relations {
        if r.homogeneous_degree(&p.gen_degrees).is_none() {
            return Err(Error::InhomogeneousInput);
        }
    }
    if order.precedence.len() != p.ngens() {
        return Err(Error::Validation("precedence size mismatch".into()));
    }

    let mut elements: Vec<FreePoly> = Vec::new();
    let mut leading: Vec<Word> = Vec::new();
    let mut queue: BinaryHeap<std::cmp::Reverse<(usize, u64, Ambiguity)>> = BinaryHeap::new();
    let mut seq: u64 = 0;

    let push_element = |g: FreePoly,
                            elements: &mut Vec<FreePoly>,
                            leading: &mut Vec<Word>,
                            queue: &mut BinaryHeap<std::cmp::Reverse<(usize, u64, Ambiguity)>>,
                            seq: &mut u64|
     -> Result<()> {
        let g = make_monic(&g, &order)?;
        let lw = order.leading_word(&g).unwrap().clone();
        let idx = elements.len();
        elements.push(g);
        leading.push(lw);
        for other in 0..=idx {
            for (a, b) in [(idx, other), (other, idx)] {
                if a == b && other != idx {
                    continue;
                }
                for (deg, amb) in ambiguities(a, b, &leading[a], &leading[b], n) {
                    *seq += 1;
                    queue.push(std::cmp::Reverse((deg, *seq, amb)));
                }
            }
        }
        Ok(())
    };

    for r in &p.relations {
        if r.max_word_len() > n {
            continue;
        }
        let red = reduce_with(r, &elements, &leading, &order, Strategy::Leftmost)?;
        if !red.is_zero() {
            push_element(red, &mut elements, &mut leading, &mut queue, &mut seq)?;
        }
    }

    while let Some(std::cmp::Reverse((_deg, _s, amb))) = queue.pop() {
        let s = s_poly(&amb, &elements, &leading, p.field, p.ngens())?;
        let red = reduce_with(&s, &elements, &leading, &order, Strategy::Leftmost)?;
        if !red.is_zero() {
            push_element(red, &mut elements, &mut leading, &mut queue, &mut seq)?;
        }
    }

    // inter-reduce: drop elements whose leading word contains another's,
    // then tail-reduce each survivor against the others
    let mut keep: Vec<bool> = vec![true; elements.len()];
    for i in 0..elements.len() {
        for j in 0..elements.len() {
            if i != j
                && keep[i]
                && keep[j]
                && leading[i].find_subword(&leading[j]).is_some()
                && (leading[i].len() > leading[j].len() || i > j)
            {
                keep[i] = false;
            }
        }
    }
    let kept: Vec<usize> = (0..elements.len()).filter(|&i| keep[i]).collect();
    let mut final_elements: Vec<FreePoly> = kept.iter().map(|&i| elements[i].clone()).collect();
    let final_leading: Vec<Word> = kept.iter().map(|&i| leading[i].clone()).collect();
    for i in 0..final_elements.len() {
        let others_e: Vec<FreePoly> = final_elements
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, e)| e.clone())
            .collect();
        let others_l: Vec<Word> = final_leading
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, w)| w.clone())
            .collect();
        // tail terms only: the element's own lw is irreducible by the others
        let red = reduce_with(&final_elements[i], &others_e, &others_l, &order, Strategy::Leftmost)?;
        final_elements[i] = make_monic(&red, &order)?;
    }
    // deterministic element order: by leading word
    let mut idx: Vec<usize> = (0..final_elements.len()).collect();
    idx.sort_by(|&a, &b| order.cmp_words(&final_leading[a], &final_leading[b]));
    let elements: Vec<FreePoly> = idx.iter().map(|&i| final_elements[i].clone()).collect();
    let leading: Vec<Word> = elements
        .iter()
        .map(|e| order.leading_word(e).unwrap().clone())
        .collect();

    Ok(GroebnerBasis {
        elements,
        leading,
        order,
        truncation_degree: n,
        complete_up_to: n,
        ngens: p.ngens(),
        field: p.field,
        gen_names: p.gen_names.clone(),
    })
}

/// dim_K A_0 .. dim_K A_N of the quotient algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertData {
    pub dims: Vec<usize>,
}

/// Count the words of each degree containing no leading word of the
/// truncated basis as a factor.
pub fn hilbert_function(p: &Presentation, n: usize, order: TermOrder) -> Result<HilbertData> {
    let gb = complete(p, n, order)?;
    Ok(hilbert_from_basis(&gb, n))
}

pub fn hilbert_from_basis(gb: &GroebnerBasis, n: usize) -> HilbertData {
    let mut dims = vec![0usize; n + 1];
    dims[0] = 1;
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for d in 1..=n {
        let mut next = Vec::new();
        for w in &frontier {
            'letter: for g in 0..gb.ngens {
                let mut ext = w.clone();
                ext.push(g);
                // only suffixes ending at the new letter can newly match
                for lw in &gb.leading {
                    if lw.len() <= ext.len()
                        && ext[ext.len() - lw.len()..] == lw.letters[..]
                    {
                        continue 'letter;
                    }
                }
                next.push(ext);
            }
        }
        dims[d] = next.len();
        frontier = next;
    }
    HilbertData { dims }
}

/// Enumerate the normal words of one degree, in ascending term order.
pub fn normal_words(gb: &GroebnerBasis, degree: usize) -> Vec<Word> {
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..degree {
        let mut next = Vec::new();
        for w in &words {
            'letter: for g in 0..gb.ngens {
                let mut ext = w.clone();
                ext.push(g);
                for lw in &gb.leading {
                    if lw.len() <= ext.len() && ext[ext.len() - lw.len()..] == lw.letters[..] {
                        continue 'letter;
                    }
                }
                next.push(ext);
            }
        }
        words = next;
    }
    let mut out: Vec<Word> = words.into_iter().map(Word::new).collect();
    out.sort_by(|a, b| gb.order.cmp_words(a, b));
    out
}

/// Coordinates of a (fully reduced) polynomial in a normal-word basis.
pub fn coordinates(f: &FreePoly, basis: &[Word]) -> Result<Vec<Scalar>> {
    let mut v = vec![f.field.zero(); basis.len()];
    for (w, c) in &f.terms {
        match basis.iter().position(|b| b == w) {
            Some(i) => v[i] = c.clone(),
            None => {
                return Err(Error::Validation(
                    "polynomial has a term outside the normal-word basis".into(),
                ))
            }
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Growth {
    Polynomial { delta: u32 },
    Exponential,
    Inconclusive,
}

/// Classification is a pure function of the data and the documented
/// thresholds (window = last half, ratio threshold 5/4). A finite window
/// can only estimate an asymptotic notion, so callers label this verdict
/// an estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthEstimate {
    pub classification: Growth,
    pub evidence: Vec<String>,
}

fn eventually_zero(seq: &[i128]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let start = seq.len() - seq.len().div_ceil(2);
    seq[start..].iter().all(|&x| x == 0)
}

pub fn growth_estimate(h: &HilbertData) -> Result<GrowthEstimate> {
    if h.dims.len() < 5 {
        return Err(Error::WindowTooShort {
            need: 5,
            got: h.dims.len(),
        });
    }
    let mut evidence = Vec::new();
    let mut cur: Vec<i128> = h.dims.iter().map(|&d| d as i128).collect();
    for k in 1..=h.dims.len() - 2 {
        let next: Vec<i128> = cur.windows(2).map(|w| w[1] - w[0]).collect();
        if eventually_zero(&next) {
            evidence.push(format!(
                "finite difference order {k} vanishes on the tail window"
            ));
            return Ok(GrowthEstimate {
                classification: Growth::Polynomial { delta: (k - 1) as u32 },
                evidence,
            });
        }
        cur = next;
    }
    // ratio test on the last half of the window, threshold 1 + 1/4
    let start = h.dims.len() - h.dims.len().div_ceil(2);
    let tail = &h.dims[start.max(1) - 1..];
    let exponential = tail.windows(2).all(|w| w[0] > 0 && 4 * w[1] >= 5 * w[0]) && tail.len() >= 2;
    if exponential {
        evidence.push("successive ratios stay >= 5/4 on the tail window".into());
        return Ok(GrowthEstimate {
            classification: Growth::Exponential,
            evidence,
        });
    }
    evidence.push("no finite difference vanishes and ratios fall below 5/4".into());
    Ok(GrowthEstimate {
        classification: Growth::Inconclusive,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn pres(gens: &[&str], rels: &[&str]) -> Presentation {
        let ns = names(gens);
        let relations = rels
            .iter()
            .map(|r| FreePoly::parse_text(r, &ns, q()).unwrap())
            .collect();
        Presentation::new(q(), ns, vec![1; gens.len()], relations).unwrap()
    }

    fn parse(s: &str, gens: &[&str]) -> FreePoly {
        FreePoly::parse_text(s, &names(gens), q()).unwrap()
    }

    #[test]
    fn skew_relation_is_confluent_alone() {
        // z2 z1 - mu12 z1 z2 with mu12 = 1/3
        let p = pres(&["z1", "z2"], &["z2*z1 - 1/3*z1*z2"]);
        let gb = complete(&p, 6, TermOrder::deglex(2)).unwrap();
        assert_eq!(gb.elements.len(), 1);
        let f = parse("z2*z1", &["z1", "z2"]);
        let nf = normal_form(&f, &gb).unwrap();
        assert_eq!(nf, parse("1/3*z1*z2", &["z1", "z2"]));
        // basis elements reduce to zero
        for g in &gb.elements {
            assert!(normal_form(g, &gb).unwrap().is_zero());
        }
    }

    #[test]
    fn commutator_basis_three_generators() {
        let p = Presentation::commutative(q(), &["x1", "x2", "x3"]);
        let gb = complete(&p, 5, TermOrder::deglex(3)).unwrap();
        assert_eq!(gb.elements.len(), 3);
    }

    #[test]
    fn straighten_twice() {
        let p = Presentation::commutative(q(), &["x1", "x2"]);
        let gb = complete(&p, 6, TermOrder::deglex(2)).unwrap();
        let f = parse("x1*x2*x1", &["x1", "x2"]);
        assert_eq!(
            normal_form(&f, &gb).unwrap(),
            parse("x1*x1*x2", &["x1", "x2"])
        );
    }

    #[test]
    fn self_overlap_creates_new_element() {
        // x2^2 - lambda x1^2 with lambda = 2; deglex x1 < x2
        let p = pres(&["x1", "x2"], &["x2^2 - 2*x1^2"]);
        let gb = complete(&p, 5, TermOrder::deglex(2)).unwrap();
        let ns = names(&["x1", "x2"]);
        let texts: Vec<String> = gb.elements.iter().map(|e| e.to_text(&ns)).collect();
        assert!(texts.contains(&"x2*x1^2 - x1^2*x2".to_string()), "{texts:?}");
    }

    #[test]
    fn truncation_enforced() {
        let p = pres(&["x1", "x2"], &["x2*x1 - x1*x2"]);
        let gb = complete(&p, 3, TermOrder::deglex(2)).unwrap();
        let f = parse("x1*x2*x1*x2", &["x1", "x2"]);
        assert!(matches!(
            normal_form(&f, &gb),
            Err(Error::DegreeExceedsTruncation { degree: 4, bound: 3 })
        ));
    }

    #[test]
    fn hilbert_polynomial_ring() {
        let p = Presentation::commutative(q(), &["x1", "x2"]);
        let h = hilbert_function(&p, 6, TermOrder::deglex(2)).unwrap();
        assert_eq!(h.dims, vec![1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn hilbert_free_algebra() {
        let p = Presentation::new(q(), names(&["x1", "x2"]), vec![1, 1], vec![]).unwrap();
        let h = hilbert_function(&p, 4, TermOrder::deglex(2)).unwrap();
        assert_eq!(h.dims, vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn hilbert_single_quadric() {
        let p = pres(&["x1", "x2"], &["x2^2 - 2*x1^2"]);
        let h = hilbert_function(&p, 5, TermOrder::deglex(2)).unwrap();
        assert_eq!(h.dims, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn inhomogeneous_rejected() {
        let p = pres(&["x1", "x2"], &["x2*x1 - x1"]);
        assert_eq!(
            complete(&p, 4, TermOrder::deglex(2)).err(),
            Some(Error::InhomogeneousInput)
        );
    }

    #[test]
    fn growth_classifications() {
        let poly1 = growth_estimate(&HilbertData {
            dims: vec![1, 2, 3, 4, 5, 6, 7],
        })
        .unwrap();
        assert_eq!(poly1.classification, Growth::Polynomial { delta: 1 });
        let exp = growth_estimate(&HilbertData {
            dims: vec![1, 2, 4, 8, 16, 32],
        })
        .unwrap();
        assert_eq!(exp.classification, Growth::Exponential);
        let flat = growth_estimate(&HilbertData {
            dims: vec![1, 1, 1, 1, 1, 1],
        })
        .unwrap();
        assert_eq!(flat.classification, Growth::Polynomial { delta: 0 });
        assert!(matches!(
            growth_estimate(&HilbertData { dims: vec![1, 2, 3] }),
            Err(Error::WindowTooShort { .. })
        ));
    }
}
