//! Degree-truncated free unital involutive tensor algebra over a finite
//! test-function basis, Wightman functionals on it, and the GNS construction
//! for inner-product spaces.
//!
//! Letters are abstract indices `0..b`; binding letters to momentum-space
//! smearing functions happens in the `fock` and `twopoint` modules, keeping
//! this layer free of spacetime structure. Words are enumerated in graded
//! big-endian order: degree 0 is the unit, and the degree-n word
//! `(i_1, .., i_n)` has in-degree offset `sum_j i_j b^{n-1-j}`.
//!
//! The algebra is capped at degree `d_max`; the left action of a letter is a
//! partial map, defined below the cap, and crossing the cap is reported as
//! [`Error::DegreeOverflow`], a truncation boundary rather than physics.

use crate::error::{Error, Result};
use crate::krein::{self, IndefiniteSpace, Tolerances};
use crate::linalg::{c64, cr, herm_null_space, hermitize, CMat, CVec};
use num_complex::Complex64;

/// Enumeration of all words of length 0..=d_max over b letters, together
/// with the star involution on letters.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    b: usize,
    d_max: usize,
    star: Vec<usize>,
    /// offsets[n] = number of words of degree < n; length d_max + 2.
    offsets: Vec<usize>,
}

impl AlgebraBasis {
    /// Build a basis; `star` must be an involution on `0..b`.
    pub fn new(b: usize, d_max: usize, star: Vec<usize>) -> Result<Self> {
        assert!(b >= 1, "need at least one letter");
        if star.len() != b || (0..b).any(|k| star[k] >= b || star[star[k]] != k) {
            return Err(Error::InvalidJson(
                "star map is not an involution on the letters".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(d_max + 2);
        offsets.push(0);
        let mut count = 0usize;
        let mut pow = 1usize;
        for _ in 0..=d_max {
            count += pow;
            offsets.push(count);
            pow *= b;
        }
        Ok(Self {
            b,
            d_max,
            star,
            offsets,
        })
    }

    /// Identity star map (all letters self-conjugate).
    pub fn real_letters(b: usize, d_max: usize) -> Self {
        Self::new(b, d_max, (0..b).collect()).expect("identity is an involution")
    }

    pub fn letters(&self) -> usize {
        self.b
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn star_letter(&self, k: usize) -> usize {
        self.star[k]
    }

    pub fn total_words(&self) -> usize {
        self.offsets[self.d_max + 1]
    }

    /// Number of words of degree exactly n.
    pub fn words_of_degree(&self, n: usize) -> usize {
        self.b.pow(n as u32)
    }

    /// Words of degree <= q.
    pub fn words_up_to(&self, q: usize) -> usize {
        self.offsets[q + 1]
    }

    /// Global index at which the degree-n words start.
    pub fn degree_offset(&self, n: usize) -> usize {
        self.offsets[n]
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        debug_assert!(idx < self.total_words());
        self.offsets
            .iter()
            .position(|&off| off > idx)
            .expect("index in range")
            - 1
    }

    /// Global index of a word given by its letters.
    pub fn word_index(&self, letters: &[usize]) -> Result<usize> {
        let n = letters.len();
        if n > self.d_max {
            return Err(Error::DegreeOverflow {
                degree: n,
                cap: self.d_max,
            });
        }
        let mut off = 0usize;
        for &l in letters {
            debug_assert!(l < self.b);
            off = off * self.b + l;
        }
        Ok(self.offsets[n] + off)
    }

    /// Letters of the word at a global index.
    pub fn word_at(&self, idx: usize) -> Vec<usize> {
        let n = self.degree_of(idx);
        let mut off = idx - self.offsets[n];
        let mut letters = vec![0usize; n];
        for slot in (0..n).rev() {
            letters[slot] = off % self.b;
            off /= self.b;
        }
        letters
    }

    /// Index of the starred word: letters reversed and starred.
    pub fn involution_index(&self, idx: usize) -> usize {
        let mut letters = self.word_at(idx);
        letters.reverse();
        for l in letters.iter_mut() {
            *l = self.star[*l];
        }
        self.word_index(&letters).expect("same degree")
    }

    /// Index of the concatenation of two words.
    pub fn tensor_index(&self, left: usize, right: usize) -> Result<usize> {
        let mut letters = self.word_at(left);
        letters.extend(self.word_at(right));
        self.word_index(&letters)
    }
}

/// Algebra elements are dense coefficient vectors over the word basis.
pub type Element = CVec;

/// The unit element `1`.
pub fn unit_element(basis: &AlgebraBasis) -> Element {
    let mut e = CVec::zeros(basis.total_words());
    e[0] = cr(1.0);
    e
}

/// Basis word as an element.
pub fn word_element(basis: &AlgebraBasis, letters: &[usize]) -> Result<Element> {
    let mut e = CVec::zeros(basis.total_words());
    e[basis.word_index(letters)?] = cr(1.0);
    Ok(e)
}

/// Involution on elements: letters reversed and starred, coefficients
/// conjugated.
pub fn involution(basis: &AlgebraBasis, element: &Element) -> Element {
    let mut out = CVec::zeros(element.len());
    for (idx, coeff) in element.iter().enumerate() {
        if coeff.norm_sqr() != 0.0 {
            out[basis.involution_index(idx)] += coeff.conj();
        }
    }
    out
}

/// Truncated Wightman functional: degree-n restrictions as fully-indexed
/// complex arrays over the degree-1 basis, in the word order of the basis.
#[derive(Debug, Clone)]
pub struct WightmanFunctional {
    basis: AlgebraBasis,
    blocks: Vec<Vec<Complex64>>,
}

impl WightmanFunctional {
    pub fn new(basis: AlgebraBasis, blocks: Vec<Vec<Complex64>>) -> Result<Self> {
        if blocks.len() != basis.d_max() + 1 {
            return Err(Error::InvalidJson(format!(
                "expected {} degree blocks, got {}",
                basis.d_max() + 1,
                blocks.len()
            )));
        }
        for (n, block) in blocks.iter().enumerate() {
            if block.len() != basis.words_of_degree(n) {
                return Err(Error::InvalidJson(format!(
                    "degree-{n} block has {} entries, expected {}",
                    block.len(),
                    basis.words_of_degree(n)
                )));
            }
        }
        Ok(Self { basis, blocks })
    }

    pub fn basis(&self) -> &AlgebraBasis {
        &self.basis
    }

    pub fn block(&self, n: usize) -> &[Complex64] {
        &self.blocks[n]
    }

    pub fn set_block(&mut self, n: usize, block: Vec<Complex64>) {
        assert_eq!(block.len(), self.basis.words_of_degree(n));
        self.blocks[n] = block;
    }

    /// W(1) = 1 up to the given tolerance.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.blocks[0][0] - cr(1.0)).norm() <= tol
    }

    /// Value on a single basis word.
    pub fn evaluate_word(&self, idx: usize) -> Complex64 {
        let n = self.basis.degree_of(idx);
        self.blocks[n][idx - self.basis.degree_offset(n)]
    }

    /// Linear extension over word coefficients.
    pub fn evaluate(&self, element: &Element) -> Complex64 {
        assert_eq!(element.len(), self.basis.total_words());
        let mut acc = c64(0.0, 0.0);
        for (idx, coeff) in element.iter().enumerate() {
            if coeff.norm_sqr() != 0.0 {
                acc += coeff * self.evaluate_word(idx);
            }
        }
        acc
    }

    /// Largest deviation of W(w*) from conj(W(w)) over all basis words.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for idx in 0..self.basis.total_words() {
            let starred = self.basis.involution_index(idx);
            dev = dev.max((self.evaluate_word(starred) - self.evaluate_word(idx).conj()).norm());
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }
}

/// GNS data for the quotient of the degree-truncated algebra by the left
/// ideal of the functional.
///
/// Words of degree <= q = floor(d_max / 2) span the sector on which all
/// pairings W(f* (x) h) exist. The quotient keeps an orthonormal
/// (Euclidean) complement of the numerical kernel of the word gram, chosen
/// by norm-pivoted Gram-Schmidt over the word basis so coordinates stay
/// aligned with words wherever possible.
#[derive(Debug, Clone)]
pub struct GnsSpace {
    basis: AlgebraBasis,
    q: usize,
    n_words: usize,
    gram_words: CMat,
    complement: CMat,
    space: IndefiniteSpace,
    vacuum: CVec,
}

impl GnsSpace {
    pub fn basis(&self) -> &AlgebraBasis {
        &self.basis
    }

    /// Maximum word degree represented in the GNS sector.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn word_dim(&self) -> usize {
        self.n_words
    }

    pub fn quotient_dim(&self) -> usize {
        self.space.dim()
    }

    /// Quotient as an indefinite space (identity auxiliary product).
    pub fn space(&self) -> &IndefiniteSpace {
        &self.space
    }

    /// Word-level gram `M[f][h] = W(f* (x) h)`.
    pub fn word_gram(&self) -> &CMat {
        &self.gram_words
    }

    /// Vacuum class (the class of the unit) in quotient coordinates.
    pub fn vacuum(&self) -> &CVec {
        &self.vacuum
    }

    /// Unit word as a word-level vector.
    pub fn vacuum_word(&self) -> CVec {
        let mut e = CVec::zeros(self.n_words);
        e[0] = cr(1.0);
        e
    }

    /// Representative map: word coordinates -> quotient coordinates.
    pub fn project(&self, words: &CVec) -> CVec {
        self.complement.adjoint() * words
    }

    /// Canonical lift of a quotient vector into the kernel complement.
    pub fn lift(&self, class: &CVec) -> CVec {
        &self.complement * class
    }

    /// Inner product of classes through word representatives:
    /// `<[f], [h]> = W(f* (x) h) = f† M h`.
    pub fn inner_words(&self, f: &CVec, h: &CVec) -> Complex64 {
        f.dotc(&(&self.gram_words * h))
    }

    /// Left action of a letter on a word-level vector. The input must be
    /// supported on degrees < q.
    pub fn field_action(&self, letter: usize, words: &CVec) -> Result<CVec> {
        assert_eq!(words.len(), self.n_words);
        let support_tol = 1e-12 * words.norm().max(1.0);
        let mut out = CVec::zeros(self.n_words);
        for (idx, coeff) in words.iter().enumerate() {
            if coeff.norm() <= support_tol {
                continue;
            }
            let degree = self.basis.degree_of(idx);
            if degree >= self.q {
                return Err(Error::DegreeOverflow {
                    degree: degree + 1,
                    cap: self.q,
                });
            }
            let mut letters = vec![letter];
            letters.extend(self.basis.word_at(idx));
            let target = self.basis.word_index(&letters)?;
            out[target] += coeff;
        }
        Ok(out)
    }

    /// Left action of a letter on a quotient class, by lift -> act ->
    /// project. Fails with DegreeOverflow when the canonical lift has
    /// significant support at the degree cap, which is where the truncated
    /// representation stops being defined.
    pub fn field_action_on_class(&self, letter: usize, class: &CVec) -> Result<CVec> {
        let lifted = self.lift(class);
        let acted = self.field_action(letter, &lifted)?;
        Ok(self.project(&acted))
    }
}

/// Run the GNS construction for a Hermitian Wightman functional.
pub fn gns_construct(w: &WightmanFunctional, tol: &Tolerances) -> Result<GnsSpace> {
    let dev = w.hermiticity_deviation();
    if dev > tol.eq {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let basis = w.basis().clone();
    let q = basis.d_max() / 2;
    let n_words = basis.words_up_to(q);

    // M[f][h] = W(f* (x) h); degrees add to at most 2q <= d_max.
    let mut gram_words = CMat::zeros(n_words, n_words);
    for f in 0..n_words {
        let f_star = basis.involution_index(f);
        for h in 0..n_words {
            let idx = basis.tensor_index(f_star, h)?;
            gram_words[(f, h)] = w.evaluate_word(idx);
        }
    }
    let gram_words = hermitize(&gram_words);

    // Left ideal = numerical kernel of M.
    let kernel = herm_null_space(&gram_words, tol.null);
    let rank = n_words - kernel.ncols();

    // Norm-pivoted Gram-Schmidt over projected word vectors gives a
    // deterministic orthonormal complement aligned with the word basis.
    let mut candidates: Vec<CVec> = (0..n_words)
        .map(|j| {
            let mut e = CVec::zeros(n_words);
            e[j] = cr(1.0);
            if kernel.ncols() > 0 {
                let coeffs = kernel.adjoint() * &e;
                e - &kernel * coeffs
            } else {
                e
            }
        })
        .collect();
    let mut chosen: Vec<CVec> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let (best, best_norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0usize, 0.0f64), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_norm < 1e-10 {
            break;
        }
        let u = &candidates[best] * cr(1.0 / best_norm);
        for v in candidates.iter_mut() {
            let coeff = u.dotc(v);
            *v -= &u * coeff;
        }
        chosen.push(u);
    }
    let complement = if chosen.is_empty() {
        CMat::zeros(n_words, 0)
    } else {
        CMat::from_columns(&chosen)
    };

    let gram_q = hermitize(&(complement.adjoint() * &gram_words * &complement));
    let r = gram_q.nrows();
    let space = krein::build_space(gram_q, CMat::identity(r, r), tol)?;

    let mut unit = CVec::zeros(n_words);
    unit[0] = cr(1.0);
    let vacuum = complement.adjoint() * unit;

    Ok(GnsSpace {
        basis,
        q,
        n_words,
        gram_words,
        complement,
        space,
        vacuum,
    })
}
