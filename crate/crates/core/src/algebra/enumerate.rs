//! Fixed enumerations of a field and of all homogeneous linear forms over it.
//!
//! The rationals are listed as `0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 3, -3, ...`:
//! after zero, reduced fractions `p/q` with `p, q >= 1` ordered by `p + q`, then by
//! `p`, the positive one before the negative one.
//!
//! Linear forms are listed by weight `arity + sum of coefficient indices`, then
//! by arity, then lexicographically in the coefficient index tuple. Over GF(p)
//! each index must stay below `p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use super::{AlgebraError, Field, LinearForm, Scalar};

/// Lazily extended enumeration `a_0, a_1, ...` of a field.
#[derive(Debug, Clone)]
pub struct FieldEnumeration {
    field: Field,
    cache: Vec<Scalar>,
    // next candidate (p, q) for the rational walk
    sum: u64,
    num: u64,
}

impl FieldEnumeration {
    pub fn new(field: Field) -> Self {
        let cache = match field {
            Field::Prime(p) => (0..p).map(|v| Scalar::Mod { p, v }).collect(),
            Field::Rationals => vec![field.zero()],
        };
        FieldEnumeration { field, cache, sum: 2, num: 1 }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The element `a_i`.
    pub fn get(&mut self, i: usize) -> Result<&Scalar, AlgebraError> {
        if let Field::Prime(_) = self.field {
            return self
                .cache
                .get(i)
                .ok_or(AlgebraError::IndexOutOfField { index: i, field: self.field });
        }
        while self.cache.len() <= i {
            self.extend_rationals();
        }
        Ok(&self.cache[i])
    }

    /// Elements with index below `n` (fewer if the field is smaller).
    pub fn prefix(&mut self, n: usize) -> Vec<Scalar> {
        let n = match self.field.order() {
            Some(p) => n.min(p as usize),
            None => n,
        };
        if n > 0 {
            let _ = self.get(n - 1);
        }
        self.cache[..n].to_vec()
    }

    fn extend_rationals(&mut self) {
        loop {
            let (s, p) = (self.sum, self.num);
            if p + 1 >= s {
                self.sum += 1;
                self.num = 1;
            } else {
                self.num += 1;
            }
            let q = s - p;
            if p.gcd(&q) == 1 {
                let r = BigRational::new(BigInt::from(p), BigInt::from(q));
                self.cache.push(Scalar::Rat(r.clone()));
                self.cache.push(Scalar::Rat(-r));
                return;
            }
        }
    }
}

/// The element `a_i` of the fixed enumeration of `field`.
pub fn enumerate_field(field: Field, i: usize) -> Result<Scalar, AlgebraError> {
    FieldEnumeration::new(field).get(i).cloned()
}

/// Lazily extended enumeration `phi_0, phi_1, ...` of linear forms over a field.
#[derive(Debug, Clone)]
pub struct LinearFormEnumeration {
    elements: FieldEnumeration,
    forms: Vec<LinearForm>,
    index_tuples: Vec<Vec<usize>>,
    weight: usize,
}

impl LinearFormEnumeration {
    pub fn new(field: Field) -> Self {
        LinearFormEnumeration {
            elements: FieldEnumeration::new(field),
            forms: Vec::new(),
            index_tuples: Vec::new(),
            weight: 0,
        }
    }

    pub fn field(&self) -> Field {
        self.elements.field()
    }

    /// Forms `phi_0 .. phi_{n-1}`.
    pub fn prefix(&mut self, n: usize) -> &[LinearForm] {
        while self.forms.len() < n {
            self.next_weight();
        }
        &self.forms[..n]
    }

    pub fn get(&mut self, k: usize) -> &LinearForm {
        &self.prefix(k + 1)[k]
    }

    /// Coefficient indices (into the field enumeration) of `phi_k`.
    pub fn indices(&mut self, k: usize) -> &[usize] {
        self.prefix(k + 1);
        &self.index_tuples[k]
    }

    fn next_weight(&mut self) {
        self.weight += 1;
        let w = self.weight;
        let cap = self.field().order().map(|p| p as usize);
        for arity in 1..=w {
            let mut out = Vec::new();
            compositions(arity, w - arity, cap, &mut Vec::new(), &mut out);
            for idx in out {
                let coefficients = idx
                    .iter()
                    .map(|&i| self.elements.get(i).cloned().expect("index checked against field size"))
                    .collect();
                self.forms.push(LinearForm::new(self.field(), coefficients));
                self.index_tuples.push(idx);
            }
        }
    }
}

/// All tuples of `len` naturals (each below `cap` if given) summing to `total`, in lex order.
fn compositions(len: usize, total: usize, cap: Option<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if len == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let hi = match cap {
        Some(c) => total.min(c.saturating_sub(1)),
        None => total,
    };
    for v in 0..=hi {
        prefix.push(v);
        compositions(len - 1, total - v, cap, prefix, out);
        prefix.pop();
    }
}

/// The first `up_to` forms of the fixed enumeration over `field`.
pub fn enumerate_linear_forms(field: Field, up_to: usize) -> Vec<LinearForm> {
    LinearFormEnumeration::new(field).prefix(up_to).to_vec()
}
