//! Noncommutative free-algebra polynomials, graded presentations and the
//! grading/quadratic validation verdicts, plus evaluation of degree-2
//! elements at points of P^{n-1} x P^{n-1}.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalars::{display_negative, FieldSpec, Scalar};

/// A monomial of the free algebra: a finite sequence of generator indices
/// (0-based). Ordered length-first, then lexicographically, which is deglex
/// for degree-1 generators in declaration precedence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: usize,
    pub letters: Vec<usize>,
}

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word {
            len: letters.len(),
            letters,
        }
    }

    pub fn empty() -> Self {
        Word::new(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(letters)
    }

    /// Degree w.r.t. the given generator degrees.
    pub fn degree(&self, gen_degrees: &[u32]) -> u64 {
        self.letters.iter().map(|&i| gen_degrees[i] as u64).sum()
    }

    /// First position where `pattern` occurs as a factor, if any.
    pub fn find_subword(&self, pattern: &Word) -> Option<usize> {
        if pattern.len == 0 || pattern.len > self.len {
            return None;
        }
        (0..=self.len - pattern.len)
            .find(|&i| self.letters[i..i + pattern.len] == pattern.letters[..])
    }
}

/// A noncommutative polynomial: finite map from words to nonzero scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreePoly {
    pub ngens: usize,
    pub field: FieldSpec,
    pub terms: BTreeMap<Word, Scalar>,
}

impl FreePoly {
    pub fn zero(ngens: usize, field: FieldSpec) -> Self {
        FreePoly {
            ngens,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(ngens: usize, word: Word, coeff: Scalar) -> Self {
        let field = coeff.field();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(word, coeff);
        }
        FreePoly {
            ngens,
            field,
            terms,
        }
    }

    pub fn generator(ngens: usize, i: usize, field: FieldSpec) -> Self {
        FreePoly::monomial(ngens, Word::new(vec![i]), field.one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_compatible(&self, other: &FreePoly) -> Result<()> {
        if self.ngens != other.ngens {
            return Err(Error::GeneratorMismatch);
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &FreePoly) -> Result<FreePoly> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            match terms.get_mut(w) {
                Some(existing) => {
                    let s = existing.add(c)?;
                    if s.is_zero() {
                        terms.remove(w);
                    } else {
                        *existing = s;
                    }
                }
                None => {
                    terms.insert(w.clone(), c.clone());
                }
            }
        }
        Ok(FreePoly {
            ngens: self.ngens,
            field: self.field,
            terms,
        })
    }

    pub fn neg(&self) -> FreePoly {
        FreePoly {
            ngens: self.ngens,
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &FreePoly) -> Result<FreePoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Result<FreePoly> {
        if s.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if s.is_zero() {
            return Ok(FreePoly::zero(self.ngens, self.field));
        }
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            terms.insert(w.clone(), c.mul(s)?);
        }
        Ok(FreePoly {
            ngens: self.ngens,
            field: self.field,
            terms,
        })
    }

    pub fn mul(&self, other: &FreePoly) -> Result<FreePoly> {
        self.check_compatible(other)?;
        let mut acc = FreePoly::zero(self.ngens, self.field);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                acc = acc.add(&FreePoly::monomial(
                    self.ngens,
                    w1.concat(w2),
                    c1.mul(c2)?,
                ))?;
            }
        }
        Ok(acc)
    }

    /// The common degree of all terms, when homogeneous.
    pub fn homogeneous_degree(&self, gen_degrees: &[u32]) -> Option<u64> {
        let mut it = self.terms.keys().map(|w| w.degree(gen_degrees));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Maximum term degree with all generators in degree 1.
    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// f(p) for f in A_2, with the monomial z_i z_j sent to a_i * b_j.
    pub fn evaluate_deg2(&self, a: &[Scalar], b: &[Scalar]) -> Result<Scalar> {
        if a.len() != self.ngens || b.len() != self.ngens {
            return Err(Error::DimensionMismatch(format!(
                "point coordinates must have length {}",
                self.ngens
            )));
        }
        if a.iter().all(|x| x.is_zero()) || b.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroRepresentative);
        }
        let mut acc = self.field.zero();
        for (w, c) in &self.terms {
            if w.len() != 2 {
                return Err(Error::NotDegreeTwo);
            }
            let (i, j) = (w.letters[0], w.letters[1]);
            acc = acc.add(&c.mul(&a[i].mul(&b[j])?)?)?;
        }
        Ok(acc)
    }

    /// Render with the given generator names; consecutive repeats compress
    /// to "^k". The empty polynomial prints as "0".
    pub fn to_text(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (w, c)) in self.terms.iter().rev().enumerate() {
            let neg = display_negative(c);
            let mag = if neg { c.neg() } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || w.is_empty() {
                factors.push(mag.to_string());
            }
            let mut i = 0;
            while i < w.letters.len() {
                let g = w.letters[i];
                let mut k = 1;
                while i + k < w.letters.len() && w.letters[i + k] == g {
                    k += 1;
                }
                if k == 1 {
                    factors.push(names[g].clone());
                } else {
                    factors.push(format!("{}^{}", names[g], k));
                }
                i += k;
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }

    /// Parse the `to_text` form. Accepts ASCII '-' and U+2212.
    pub fn parse_text(s: &str, names: &[String], field: FieldSpec) -> Result<FreePoly> {
        let ngens = names.len();
        let s = s.replace('\u{2212}', "-");
        let mut poly = FreePoly::zero(ngens, field);
        // split into signed terms at top level
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut sign = false;
        let mut started = false;
        for ch in s.chars() {
            match ch {
                '+' | '-' if started && !cur.trim().is_empty() => {
                    terms.push((sign, std::mem::take(&mut cur)));
                    sign = ch == '-';
                }
                '-' if !started || cur.trim().is_empty() => {
                    sign = !sign;
                    started = true;
                }
                '+' => {
                    started = true;
                }
                _ => {
                    if !ch.is_whitespace() {
                        started = true;
                    }
                    cur.push(ch);
                }
            }
        }
        if !cur.trim().is_empty() {
            terms.push((sign, cur));
        } else if terms.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        for (neg, term) in terms {
            let term = term.trim();
            if term == "0" {
                continue;
            }
            let mut coeff = field.one();
            let mut letters = Vec::new();
            for factor in term.split('*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {term:?}")));
                }
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => {
                        let k: u32 = e
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
                        (b.trim(), k)
                    }
                    None => (factor, 1),
                };
                if let Some(g) = names.iter().position(|n| n == base) {
                    for _ in 0..exp {
                        letters.push(g);
                    }
                } else {
                    let c = field.parse(base)?;
                    coeff = coeff.mul(&c.pow(exp as i64)?)?;
                }
            }
            if neg {
                coeff = coeff.neg();
            }
            poly = poly.add(&FreePoly::monomial(ngens, Word::new(letters), coeff))?;
        }
        Ok(poly)
    }
}

/// A graded presentation: named generators with positive degrees and a list
/// of defining relations in the free algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub field: FieldSpec,
    pub gen_names: Vec<String>,
    pub gen_degrees: Vec<u32>,
    pub relations: Vec<FreePoly>,
}

impl Presentation {
    pub fn new(
        field: FieldSpec,
        gen_names: Vec<String>,
        gen_degrees: Vec<u32>,
        relations: Vec<FreePoly>,
    ) -> Result<Self> {
        if gen_names.len() != gen_degrees.len() {
            return Err(Error::DimensionMismatch(
                "generator names and degrees differ in length".into(),
            ));
        }
        if gen_degrees.iter().any(|&d| d == 0) {
            return Err(Error::Validation("generator degrees must be positive".into()));
        }
        for r in &relations {
            if r.ngens != gen_names.len() {
                return Err(Error::GeneratorMismatch);
            }
            if r.is_zero() {
                return Err(Error::Validation("zero relation".into()));
            }
        }
        Ok(Presentation {
            field,
            gen_names,
            gen_degrees,
            relations,
        })
    }

    pub fn ngens(&self) -> usize {
        self.gen_names.len()
    }

    /// Commutator presentation of the polynomial ring on the given names.
    pub fn commutative(field: FieldSpec, names: &[&str]) -> Presentation {
        let n = names.len();
        let mut relations = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                // x_i x_j - x_j x_i
                let a = FreePoly::monomial(n, Word::new(vec![i, j]), field.one());
                let b = FreePoly::monomial(n, Word::new(vec![j, i]), field.one());
                relations.push(a.sub(&b).unwrap());
            }
        }
        Presentation {
            field,
            gen_names: names.iter().map(|s| s.to_string()).collect(),
            gen_degrees: vec![1; n],
            relations,
        }
    }
}

/// Verdicts of the grading and quadratic axioms; never an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub graded: bool,
    pub quadratic: bool,
    pub generated_in_degree_one: bool,
    pub reasons: Vec<String>,
}

pub fn validate_presentation(p: &Presentation) -> ValidationReport {
    let mut reasons = Vec::new();
    let mut graded = true;
    let mut all_deg2 = true;
    for (k, r) in p.relations.iter().enumerate() {
        match r.homogeneous_degree(&p.gen_degrees) {
            Some(d) => {
                if d != 2 {
                    all_deg2 = false;
                }
            }
            None => {
                graded = false;
                all_deg2 = false;
                reasons.push(format!(
                    "relation {} ({}) is not homogeneous",
                    k + 1,
                    r.to_text(&p.gen_names)
                ));
            }
        }
    }
    let generated_in_degree_one = p.gen_degrees.iter().all(|&d| d == 1);
    if !generated_in_degree_one {
        reasons.push("some generators have degree > 1".into());
    }
    if graded && !all_deg2 {
        reasons.push("some relations are homogeneous of degree != 2".into());
    }
    ValidationReport {
        graded,
        quadratic: graded && generated_in_degree_one && all_deg2,
        generated_in_degree_one,
        reasons,
    }
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

    fn parse(s: &str, ns: &[&str]) -> FreePoly {
        FreePoly::parse_text(s, &names(ns), q()).unwrap()
    }

    #[test]
    fn product_expansion() {
        let ns = ["x1", "x2"];
        let f = parse("x1 + x2", &ns);
        let g = parse("x1", &ns);
        assert_eq!(f.mul(&g).unwrap(), parse("x1*x1 + x2*x1", &ns));
        let zero = FreePoly::zero(2, q());
        assert!(f.mul(&zero).unwrap().is_zero());
        let comm = parse("x1*x2 - x2*x1", &ns);
        assert_eq!(comm.mul(&g).unwrap(), parse("x1*x2*x1 - x2*x1*x1", &ns));
    }

    #[test]
    fn text_round_trip() {
        let ns = ["x1", "x2"];
        let f = parse("x1*x2 - 2/3*x2*x1", &ns);
        let s = f.to_text(&names(&ns));
        assert_eq!(s, "-2/3*x2*x1 + x1*x2");
        assert_eq!(parse(&s, &ns), f);
        let g = parse("x2^2 - 3*x1^2", &ns);
        assert_eq!(parse(&g.to_text(&names(&ns)), &ns), g);
    }

    #[test]
    fn inhomogeneous_relation_detected() {
        // x^2 - y with deg x = deg y = 1: not graded
        let p = Presentation::new(
            q(),
            names(&["x", "y"]),
            vec![1, 1],
            vec![parse("x^2 - y", &["x", "y"])],
        )
        .unwrap();
        let rep = validate_presentation(&p);
        assert!(!rep.graded);
        assert!(!rep.quadratic);
    }

    #[test]
    fn degree_two_generator() {
        // x^2 - y with deg y = 2: graded but not generated in degree 1
        let p = Presentation::new(
            q(),
            names(&["x", "y"]),
            vec![1, 2],
            vec![parse("x^2 - y", &["x", "y"])],
        )
        .unwrap();
        let rep = validate_presentation(&p);
        assert!(rep.graded);
        assert!(!rep.generated_in_degree_one);
        assert!(!rep.quadratic);
    }

    #[test]
    fn cubic_relation_not_quadratic() {
        let p = Presentation::new(q(), names(&["x"]), vec![1], vec![parse("x^3", &["x"])]).unwrap();
        let rep = validate_presentation(&p);
        assert!(rep.graded);
        assert!(rep.generated_in_degree_one);
        assert!(!rep.quadratic);
    }

    #[test]
    fn commutator_presentation_quadratic() {
        let p = Presentation::commutative(q(), &["x1", "x2", "x3"]);
        let rep = validate_presentation(&p);
        assert!(rep.quadratic);
    }

    #[test]
    fn deg2_evaluation() {
        let ns = ["z1", "z2"];
        // z2*z1 - mu12*z1*z2 with mu12 = 1 here for simplicity of literals
        let f = parse("z2*z1 - 3*z1*z2", &ns);
        let one = q().one();
        let zero = q().zero();
        // at ((1,0),(1,0)): a2*b1 - 3*a1*b2 = 0
        let v = f
            .evaluate_deg2(&[one.clone(), zero.clone()], &[one.clone(), zero.clone()])
            .unwrap();
        assert!(v.is_zero());
        // at ((0,1),(1,0)): 1*1 - 3*0*0 = 1
        let v = f
            .evaluate_deg2(&[zero.clone(), one.clone()], &[one.clone(), zero.clone()])
            .unwrap();
        assert!(v.is_one());
        assert_eq!(
            f.evaluate_deg2(&[zero.clone(), zero.clone()], &[one.clone(), zero]),
            Err(Error::ZeroRepresentative)
        );
        let g = parse("x1*x2*x1", &["x1", "x2"]);
        assert_eq!(
            g.evaluate_deg2(&[one.clone(), one.clone()], &[one.clone(), one]),
            Err(Error::NotDegreeTwo)
        );
    }
}
