use serde::{Deserialize, Serialize};

use super::{dot, AlgebraError, Field, Scalar};

/// A homogeneous linear functional `K^m -> K`, given by its coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    field: Field,
    coefficients: Vec<Scalar>,
}

impl LinearForm {
    pub fn new(field: Field, coefficients: Vec<Scalar>) -> Self {
        debug_assert!(coefficients.iter().all(|c| field.contains(c)));
        LinearForm { field, coefficients }
    }

    pub fn zero(field: Field, arity: usize) -> Self {
        LinearForm { field, coefficients: vec![field.zero(); arity] }
    }

    /// The form picking out coordinate `i` of `K^arity`.
    pub fn coordinate(field: Field, arity: usize, i: usize) -> Self {
        let mut f = Self::zero(field, arity);
        f.coefficients[i] = field.one();
        f
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coefficients
    }

    pub fn eval(&self, args: &[Scalar]) -> Result<Scalar, AlgebraError> {
        if args.len() != self.arity() {
            return Err(AlgebraError::DimensionMismatch { expected: self.arity(), got: args.len() });
        }
        for a in args {
            self.field.check(a)?;
        }
        Ok(dot(self.field, &self.coefficients, args))
    }
}

fn sample_vectors(field: Field, arity: usize) -> Vec<Vec<Scalar>> {
    let ramp = |shift: i64, sign: i64| -> Vec<Scalar> {
        (0..arity as i64).map(|i| field.from_i64(sign.pow(i as u32) * (i + shift))).collect()
    };
    let mut out = vec![vec![field.one(); arity], ramp(1, 1), ramp(2, -1), ramp(3, 1)];
    let sum: Vec<Scalar> = out[1].iter().zip(&out[2]).map(|(a, b)| a + b).collect();
    out.push(sum);
    out
}

/// Extract the coefficients of a rule declared linear, by evaluating it on unit words.
///
/// The result is then re-checked against the rule on a fixed set of sample
/// vectors, and `NotLinear` is returned when the dot product disagrees.
pub fn coefficients_of<R>(field: Field, arity: usize, mut rule: R) -> Result<LinearForm, AlgebraError>
where
    R: FnMut(&[Scalar]) -> Scalar,
{
    let coefficients: Vec<Scalar> = (0..arity)
        .map(|i| {
            let mut unit = vec![field.zero(); arity];
            unit[i] = field.one();
            rule(&unit)
        })
        .collect();
    for c in &coefficients {
        field.check(c)?;
    }
    let form = LinearForm::new(field, coefficients);
    for sample in sample_vectors(field, arity) {
        let got = rule(&sample);
        let expected = form.eval(&sample)?;
        if got != expected {
            return Err(AlgebraError::NotLinear {
                sample: sample.iter().map(|s| s.to_string()).collect(),
                got: got.to_string(),
                expected: expected.to_string(),
            });
        }
    }
    Ok(form)
}
