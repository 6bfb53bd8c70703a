//! Declarative network description: an ordered layer list plus loss and seed.
//! The seed fully determines the initial weights, so a spec is a complete,
//! reproducible recipe for a model.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Elu,
    Tanh,
    Linear,
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp() - 1.0
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Linear => x,
        }
    }

    /// Derivative in terms of the pre-activation value.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Elu => {
                if x > 0.0 {
                    1.0
                } else {
                    x.exp()
                }
            }
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Linear => 1.0,
        }
    }

    pub fn parse(s: &str) -> Option<Activation> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Some(Activation::Relu),
            "elu" => Some(Activation::Elu),
            "tanh" => Some(Activation::Tanh),
            "linear" | "none" | "dense" => Some(Activation::Linear),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LayerSpec {
    /// Fully connected layer over a single-row feature.
    Dense { units: usize, activation: Activation },
    /// 1-D valid cross-correlation, stride 1, no padding.
    Conv1d {
        filters: usize,
        kernel: usize,
        activation: Activation,
    },
    /// Standard gated LSTM cell over the sequence; emits the final hidden state.
    Lstm { units: usize },
    /// Reshape any feature map to a single row.
    Flatten,
}

/// Training loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Loss {
    Mse,
    /// MSE plus `weight * mean over target rows of (row sum - 1)^2`: keeps
    /// predicted species fractions summing to one.
    PaMse { weight: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
    pub loss: Loss,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activations_match_definitions() {
        assert_eq!(Activation::Relu.apply(-2.0), 0.0);
        assert_eq!(Activation::Relu.apply(3.0), 3.0);
        assert!((Activation::Elu.apply(-1.0) - ((-1.0f64).exp() - 1.0)).abs() < 1e-15);
        assert_eq!(Activation::Linear.apply(0.7), 0.7);
        assert!((Activation::Tanh.apply(0.5) - 0.5f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for act in [
            Activation::Relu,
            Activation::Elu,
            Activation::Tanh,
            Activation::Linear,
        ] {
            for x in [-1.3, -0.2, 0.4, 2.1] {
                let fd = (act.apply(x + h) - act.apply(x - h)) / (2.0 * h);
                assert!(
                    (act.derivative(x) - fd).abs() < 1e-8,
                    "{act:?} at {x}: {} vs {fd}",
                    act.derivative(x)
                );
            }
        }
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Conv1d {
                    filters: 4,
                    kernel: 3,
                    activation: Activation::Elu,
                },
                LayerSpec::Flatten,
                LayerSpec::Dense {
                    units: 8,
                    activation: Activation::Tanh,
                },
            ],
            loss: Loss::PaMse { weight: 0.5 },
            seed: 42,
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: NetworkSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
