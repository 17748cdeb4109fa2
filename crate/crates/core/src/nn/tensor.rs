//! Dense row-major f64 tensor with shape metadata.

use super::NnError;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Tensor {
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Tensor, NnError> {
        let want: usize = shape.iter().product();
        if data.len() != want {
            return Err(NnError::Shape {
                layer: "tensor".to_string(),
                detail: format!("{} values for shape {shape:?} (need {want})", data.len()),
            });
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Shape as `(a, b, c)`, failing on other ranks.
    pub fn dims3(&self, context: &str) -> Result<(usize, usize, usize), NnError> {
        match self.shape[..] {
            [a, b, c] => Ok((a, b, c)),
            _ => Err(NnError::Shape {
                layer: context.to_string(),
                detail: format!("expected rank 3, got {:?}", self.shape),
            }),
        }
    }

    /// Shape as `(a, b)`, failing on other ranks.
    pub fn dims2(&self, context: &str) -> Result<(usize, usize), NnError> {
        match self.shape[..] {
            [a, b] => Ok((a, b)),
            _ => Err(NnError::Shape {
                layer: context.to_string(),
                detail: format!("expected rank 2, got {:?}", self.shape),
            }),
        }
    }

    pub fn assert_finite(&self, context: &str) -> Result<(), NnError> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(NnError::NonFinite(context.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_checks_the_length() {
        assert!(Tensor::from_vec(&[2, 3], vec![0.0; 6]).is_ok());
        assert!(Tensor::from_vec(&[2, 3], vec![0.0; 5]).is_err());
    }

    #[test]
    fn finiteness_is_detected() {
        let mut t = Tensor::zeros(&[4]);
        assert!(t.assert_finite("x").is_ok());
        t.data_mut()[2] = f64::NAN;
        assert!(matches!(t.assert_finite("x"), Err(NnError::NonFinite(_))));
    }
}
