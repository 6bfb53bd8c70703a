//! Finite-difference verification of every analytic gradient: dense, conv1d
//! and LSTM layers under both losses, over a spread of randomized
//! configurations. Central differences with step 1e-5 must agree with the
//! backward pass within 1e-4 relative (1e-6 absolute floor).

use romkit_core::rng::Rng;
use romkit_nn::feature::Feature;
use romkit_nn::loss::loss_and_grad;
use romkit_nn::{Activation, LayerSpec, Loss, Network, NetworkSpec};

const FD_STEP: f64 = 1e-5;
const REL_TOL: f64 = 1e-4;
const ABS_FLOOR: f64 = 1e-6;

fn scalar_loss(net: &Network, input: &Feature, target: &Feature) -> f64 {
    let pred = net.forward(input).unwrap();
    let (v, _) = loss_and_grad(net.spec().loss, &pred, &target.clone());
    v
}

/// Compare analytic and central finite-difference gradients for one network.
fn check(net: &mut Network, input: &Feature, target: &Feature, label: &str) {
    let (pred, caches) = net.forward_cached(input).unwrap();
    let (_, dloss) = loss_and_grad(net.spec().loss, &pred, target);
    let mut analytic = vec![0.0; net.params().len()];
    net.backward(&caches, &Feature::row_vector(dloss), &mut analytic);

    for i in 0..net.params().len() {
        let orig = net.params()[i];
        net.params_mut()[i] = orig + FD_STEP;
        let up = scalar_loss(net, input, target);
        net.params_mut()[i] = orig - FD_STEP;
        let down = scalar_loss(net, input, target);
        net.params_mut()[i] = orig;
        let fd = (up - down) / (2.0 * FD_STEP);
        let denom = analytic[i].abs().max(fd.abs()).max(ABS_FLOOR);
        let rel = (analytic[i] - fd).abs() / denom;
        assert!(
            rel < REL_TOL,
            "{label}: parameter {i}: analytic {} vs finite-diff {fd} (rel {rel:.3e})",
            analytic[i]
        );
    }
}

fn random_feature(rng: &mut Rng, rows: usize, cols: usize) -> Feature {
    Feature::from_vec(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.normal()).collect(),
    )
}

fn losses() -> [Loss; 2] {
    [Loss::Mse, Loss::PaMse { weight: 0.8 }]
}

#[test]
fn dense_stack_gradients() {
    let mut case = 0;
    for loss in losses() {
        for (units, act) in [
            (3usize, Activation::Relu),
            (5, Activation::Elu),
            (4, Activation::Tanh),
            (2, Activation::Linear),
        ] {
            let mut rng = Rng::seed_from(100 + case);
            let spec = NetworkSpec {
                layers: vec![
                    LayerSpec::Dense {
                        units,
                        activation: act,
                    },
                    LayerSpec::Dense {
                        units: 2,
                        activation: Activation::Linear,
                    },
                ],
                loss,
                seed: 200 + case,
            };
            let mut net = Network::new(spec, (1, 4)).unwrap();
            let input = random_feature(&mut rng, 1, 4);
            let target = random_feature(&mut rng, 1, 2);
            check(&mut net, &input, &target, &format!("dense case {case}"));
            case += 1;
        }
    }
}

#[test]
fn conv_stack_gradients() {
    let mut case = 0;
    for loss in losses() {
        for (filters, kernel, act) in [
            (2usize, 2usize, Activation::Elu),
            (3, 3, Activation::Tanh),
            (1, 1, Activation::Relu),
            (2, 4, Activation::Linear),
        ] {
            let mut rng = Rng::seed_from(300 + case);
            let rows = 6;
            let chans = 3;
            let spec = NetworkSpec {
                layers: vec![
                    LayerSpec::Conv1d {
                        filters,
                        kernel,
                        activation: act,
                    },
                    LayerSpec::Flatten,
                    LayerSpec::Dense {
                        units: 4,
                        activation: Activation::Tanh,
                    },
                ],
                loss,
                seed: 400 + case,
            };
            let mut net = Network::new(spec, (rows, chans)).unwrap();
            let input = random_feature(&mut rng, rows, chans);
            let target = random_feature(&mut rng, 2, 2);
            check(&mut net, &input, &target, &format!("conv case {case}"));
            case += 1;
        }
    }
}

#[test]
fn lstm_stack_gradients() {
    let mut case = 0;
    for loss in losses() {
        for (units, steps) in [(2usize, 3usize), (3, 5), (4, 2), (2, 7)] {
            let mut rng = Rng::seed_from(500 + case);
            let chans = 3;
            let spec = NetworkSpec {
                layers: vec![
                    LayerSpec::Lstm { units },
                    LayerSpec::Dense {
                        units: 3,
                        activation: Activation::Linear,
                    },
                ],
                loss,
                seed: 600 + case,
            };
            let mut net = Network::new(spec, (steps, chans)).unwrap();
            let input = random_feature(&mut rng, steps, chans);
            let target = random_feature(&mut rng, 1, 3);
            check(&mut net, &input, &target, &format!("lstm case {case}"));
            case += 1;
        }
    }
}

#[test]
fn mixed_conv_lstm_dense_gradients() {
    // A deeper mixed network exercising the gradient flow through every
    // layer type at once.
    for (i, loss) in losses().into_iter().enumerate() {
        let mut rng = Rng::seed_from(700 + i as u64);
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Conv1d {
                    filters: 3,
                    kernel: 2,
                    activation: Activation::Elu,
                },
                LayerSpec::Lstm { units: 4 },
                LayerSpec::Dense {
                    units: 6,
                    activation: Activation::Tanh,
                },
                LayerSpec::Dense {
                    units: 4,
                    activation: Activation::Linear,
                },
            ],
            loss,
            seed: 800 + i as u64,
        };
        let mut net = Network::new(spec, (7, 2)).unwrap();
        let input = random_feature(&mut rng, 7, 2);
        let target = random_feature(&mut rng, 2, 2);
        check(&mut net, &input, &target, &format!("mixed case {i}"));
    }
}
