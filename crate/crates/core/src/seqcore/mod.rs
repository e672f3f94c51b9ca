//! Elementary differentiable operations over token sequences: linear maps,
//! layer normalization, softmax, ReLU, feature-dimension pooling, each with
//! an analytic backward, plus a central-difference gradient verifier.

mod gradcheck;
mod matrix;
mod ops;
mod params;

pub use gradcheck::{grad_check, GradReport};
pub use matrix::Matrix;
pub use ops::{
    layer_norm, layer_norm_backward, linear, linear_backward, mean_over_features,
    mean_over_features_backward, relu, relu_backward, softmax, softmax_backward,
};
pub use params::{ParamEntry, ParamStore};

use crate::error::{Error, Result};

/// A T×D sequence of token features; row 0 is the CLS token.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSequence {
    tokens: Matrix,
}

impl TokenSequence {
    pub const CLS_INDEX: usize = 0;

    pub fn new(tokens: Matrix) -> Result<Self> {
        if tokens.rows() < 1 || tokens.cols() < 1 {
            return Err(Error::Dimension(format!(
                "token sequence needs T >= 1 and D >= 1, got {}x{}",
                tokens.rows(),
                tokens.cols()
            )));
        }
        if !tokens.is_finite() {
            return Err(Error::Data("token sequence contains non-finite values".into()));
        }
        Ok(TokenSequence { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.rows()
    }

    pub fn is_empty(&self) -> bool {
        false // T >= 1 by construction
    }

    pub fn dim(&self) -> usize {
        self.tokens.cols()
    }

    pub fn cls(&self) -> &[f64] {
        self.tokens.row(Self::CLS_INDEX)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.tokens
    }

    pub fn into_matrix(self) -> Matrix {
        self.tokens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let m = Matrix::from_rows(&[vec![1.0, f64::NAN]]).unwrap();
        assert!(TokenSequence::new(m).is_err());
    }

    #[test]
    fn cls_is_row_zero() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let seq = TokenSequence::new(m).unwrap();
        assert_eq!(seq.cls(), &[1.0, 2.0]);
        assert_eq!(seq.len(), 2);
        assert_eq!(seq.dim(), 2);
    }
}
