use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A Boolean threshold function `[w1, ..., wn; T]`: the output is 1 exactly
/// when the weighted sum of the binary inputs reaches `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThresholdFunction {
    weights: Vec<i32>,
    threshold: i32,
}

impl ThresholdFunction {
    pub fn new(weights: Vec<i32>, threshold: i32) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Argument(
                "threshold function needs at least one weight".into(),
            ));
        }
        Ok(ThresholdFunction { weights, threshold })
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    pub fn threshold(&self) -> i32 {
        self.threshold
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, inputs: &[bool]) -> Result<bool> {
        eval_threshold(self, inputs)
    }
}

impl fmt::Display for ThresholdFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "[{}; {}]", w.join(", "), self.threshold)
    }
}

/// Evaluate `tf` on `inputs`.
pub fn eval_threshold(tf: &ThresholdFunction, inputs: &[bool]) -> Result<bool> {
    if inputs.len() != tf.weights.len() {
        return Err(Error::Argument(format!(
            "threshold function {tf} takes {} inputs, got {}",
            tf.weights.len(),
            inputs.len()
        )));
    }
    let sum: i64 = tf
        .weights
        .iter()
        .zip(inputs)
        .map(|(&w, &x)| if x { w as i64 } else { 0 })
        .sum();
    Ok(sum >= tf.threshold as i64)
}
