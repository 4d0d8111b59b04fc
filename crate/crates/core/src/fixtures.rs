//! Seeded fixture models, inputs and images.
//!
//! Tests, examples and `gig gen-fixtures` all build their fixtures here.
//! Every random parameter comes from [`substream`] under the
//! [`Domain::Fixture`] domain and is rounded to four decimals so the JSON
//! files stay readable and regenerate byte for byte.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::diffmodel::{
    AnalyticSpec, BilinearProduct, Bump, BumpMixture, DifferentiableModel, FeatureVector, LayerSpec, Linear, Mlp,
    ModelFile, ModelSpec, Shape, SymmetricSum, Univariate,
};
use crate::imageio::{encode, ImageBuffer, MaskBuffer};
use crate::rng::{substream, Domain};

// substream indices of the seeded fixture families
const BUMP_FAMILY: u64 = 1 << 40;
const SMOOTH_BUMPS: u64 = 2 << 40;
const BUMPY_MLP: u64 = 3 << 40;
const TIED_MLP: u64 = 4 << 40;

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    round4(rng.random_range(lo..hi))
}

fn normal(rng: &mut impl Rng, scale: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    round4(z * scale)
}

/// `F(x) = 2 x_1 + 3 x_2`.
pub fn linear_pair() -> Linear {
    Linear::new(vec![2.0, 3.0], 0.0)
}

/// Linear model over a 4x4 grayscale image, weights `(i - 7.5) / 4`.
pub fn linear_image() -> Linear {
    let weights = (0..16).map(|i| (i as f64 - 7.5) / 4.0).collect();
    Linear::with_shape(weights, 0.0, Shape::image(4, 4, 1)).expect("16 weights for 16 pixels")
}

/// `F(x) = x_1 x_2`.
pub fn bilinear() -> BilinearProduct {
    BilinearProduct::new(2, vec![(0, 1)]).expect("valid pair")
}

/// `F(x) = sum_i softplus(3 (x_i - 0.5))` over four features.
pub fn symmetric_sum() -> SymmetricSum {
    SymmetricSum::new(4, Univariate::Softplus { scale: 3.0, shift: 0.5 })
}

/// Gentle 8-feature bump mixture with a linear trend: three wide bumps of
/// amplitude 0.05 with alternating signs. Smooth enough for the
/// completeness checks at T = 200.
pub fn smooth_bumps() -> BumpMixture {
    let mut rng = substream(0, Domain::Fixture, SMOOTH_BUMPS);
    let n = 8;
    let bumps = [0.05, -0.05, 0.05]
        .into_iter()
        .map(|amplitude| Bump {
            center: (0..n).map(|_| uniform(&mut rng, 0.0, 1.0)).collect(),
            amplitude,
            sharpness: 2.0,
            dims: Vec::new(),
        })
        .collect();
    let slope = (0..n).map(|_| uniform(&mut rng, -0.5, 0.5)).collect();
    BumpMixture::new(Shape::Flat(n), bumps, slope).expect("consistent bump sizes")
}

/// Two features with one narrow bump beside the segment `(0,0) -> (1,0)`:
/// along that segment the gradient is large but nearly orthogonal to the
/// direction of travel.
pub fn off_path_bump() -> BumpMixture {
    let bump = Bump { center: vec![0.5, 0.2], amplitude: 1.0, sharpness: 60.0, dims: Vec::new() };
    BumpMixture::new(Shape::Flat(2), vec![bump], Vec::new()).expect("consistent bump sizes")
}

/// Member `seed` of the 64-feature bump family: 64 narrow bumps, each over
/// three random features, with amplitudes in `[-1, 1]`. Features interact
/// only through the bumps, so paths that avoid them accumulate less
/// path-dependent attribution.
pub fn bump_family(seed: u64) -> BumpMixture {
    let mut rng = substream(seed, Domain::Fixture, BUMP_FAMILY);
    let n = 64;
    let bumps = (0..64)
        .map(|_| {
            let mut dims: Vec<usize> = Vec::with_capacity(3);
            while dims.len() < 3 {
                let d = rng.random_range(0..n);
                if !dims.contains(&d) {
                    dims.push(d);
                }
            }
            Bump {
                center: (0..3).map(|_| uniform(&mut rng, 0.0, 1.0)).collect(),
                amplitude: uniform(&mut rng, -1.0, 1.0),
                sharpness: 50.0,
                dims,
            }
        })
        .collect();
    BumpMixture::new(Shape::Flat(n), bumps, Vec::new()).expect("consistent bump sizes")
}

fn dense(rng: &mut impl Rng, rows: usize, cols: usize, gain: f64, activation: &str) -> LayerSpec {
    let scale = gain / (cols as f64).sqrt();
    LayerSpec {
        weights: (0..rows).map(|_| (0..cols).map(|_| normal(rng, scale)).collect()).collect(),
        bias: (0..rows).map(|_| normal(rng, 0.1)).collect(),
        activation: activation.into(),
    }
}

/// Softplus network 8 -> 16 -> 3 with Gaussian weights scaled by
/// `0.5/sqrt(fan_in)` in the hidden layer and `1/sqrt(fan_in)` at the output.
/// The reduced hidden gain keeps the curvature low enough for Guided IG's
/// first-order step rule to meet the completeness tolerance at T = 200.
pub fn bumpy_mlp(seed: u64) -> Mlp {
    let mut rng = substream(seed, Domain::Fixture, BUMPY_MLP);
    let spec = ModelSpec {
        input_shape: vec![8],
        layers: vec![dense(&mut rng, 16, 8, 0.5, "softplus"), dense(&mut rng, 3, 16, 1.0, "identity")],
        outputs: 3,
    };
    Mlp::from_spec(&spec).expect("generated layers compose")
}

/// Hand-set ReLU network 2 -> 3 -> 2.
pub fn relu_mlp() -> Mlp {
    let spec = ModelSpec {
        input_shape: vec![2],
        layers: vec![
            LayerSpec {
                weights: vec![vec![1.0, -1.0], vec![0.5, 2.0], vec![-1.5, 1.0]],
                bias: vec![0.0, -0.5, 0.25],
                activation: "relu".into(),
            },
            LayerSpec {
                weights: vec![vec![1.0, 2.0, -1.0], vec![-0.5, 1.0, 3.0]],
                bias: vec![0.1, -0.2],
                activation: "identity".into(),
            },
        ],
        outputs: 2,
    };
    Mlp::from_spec(&spec).expect("hand-set layers compose")
}

/// Softplus network 6 -> 8 -> 2 whose first layer uses identical weight
/// columns for each returned feature pair, making the paired features
/// symmetric for every output.
pub fn tied_mlp(seed: u64) -> (Mlp, Vec<(usize, usize)>) {
    let mut rng = substream(seed, Domain::Fixture, TIED_MLP);
    let n = 6;
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let pairs: Vec<(usize, usize)> = order.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
    let mut first = dense(&mut rng, 8, n, 1.0, "softplus");
    for row in &mut first.weights {
        for &(i, j) in &pairs {
            row[j] = row[i];
        }
    }
    let spec =
        ModelSpec { input_shape: vec![n], layers: vec![first, dense(&mut rng, 2, 8, 1.0, "identity")], outputs: 2 };
    (Mlp::from_spec(&spec).expect("generated layers compose"), pairs)
}

/// Point `index` of a seeded stream of points uniform in `[lo, hi)^n`.
pub fn uniform_point(n: usize, seed: u64, index: u64, lo: f64, hi: f64) -> FeatureVector {
    let mut rng = substream(seed, Domain::SyntheticInput, index);
    FeatureVector::flat((0..n).map(|_| rng.random_range(lo..hi)).collect()).expect("finite samples")
}

/// 4x4 all-white grayscale image.
pub fn ones_image() -> ImageBuffer {
    ImageBuffer::new(4, 4, 1, vec![255; 16]).expect("valid size")
}

/// 4x4 RGB ramp: red grows along rows, green along columns, blue constant.
pub fn ramp_image() -> ImageBuffer {
    let mut samples = Vec::with_capacity(48);
    for r in 0..4u8 {
        for c in 0..4u8 {
            samples.extend([r * 85, c * 85, 128]);
        }
    }
    ImageBuffer::new(4, 4, 3, samples).expect("valid size")
}

/// 4x4 mask marking the right half as object.
pub fn half_mask() -> MaskBuffer {
    MaskBuffer { width: 4, height: 4, labels: (0..16).map(|i| i % 4 >= 2).collect() }
}

fn analytic_file(spec: AnalyticSpec) -> Vec<u8> {
    ModelFile::Analytic(spec).to_json().into_bytes()
}

fn bump_file(m: &BumpMixture) -> Vec<u8> {
    analytic_file(AnalyticSpec::BumpMixture {
        input_shape: m.input_shape().dims(),
        bumps: m.bumps().to_vec(),
        slope: m.slope().to_vec(),
    })
}

fn network_file(m: &Mlp) -> Vec<u8> {
    ModelFile::Network(m.to_spec()).to_json().into_bytes()
}

/// Values recorded at generation time, checked by the test-suite against
/// the model files.
pub fn manifest() -> serde_json::Value {
    let zero = vec![0.0; 8];
    let bumpy = bumpy_mlp(0);
    let logits = bumpy.forward(&zero);
    let softmax0 = crate::diffmodel::evaluate_raw(&bumpy, &zero, crate::diffmodel::Target::softmax(0))
        .expect("zero vector fits the model");
    serde_json::json!({
        "files": bundle_files().iter().map(|(name, _)| *name).collect::<Vec<_>>(),
        "bumpy_zero_logits": logits,
        "bumpy_zero_softmax_class0": softmax0,
        "bump64_seed": 0,
    })
}

/// Every bundled fixture file as `(file name, contents)`, in a fixed order,
/// followed by `manifest.json`.
pub fn bundle() -> Vec<(&'static str, Vec<u8>)> {
    let mut files = bundle_files();
    let mut manifest = serde_json::to_vec_pretty(&manifest()).expect("manifest serializes");
    manifest.push(b'\n');
    files.push(("manifest.json", manifest));
    files
}

fn bundle_files() -> Vec<(&'static str, Vec<u8>)> {
    let linear = linear_image();
    vec![
        (
            "linear.json",
            analytic_file(AnalyticSpec::Linear {
                input_shape: vec![4, 4, 1],
                weights: linear.weights().to_vec(),
                bias: linear.bias(),
            }),
        ),
        ("bilinear.json", analytic_file(AnalyticSpec::Bilinear { input_shape: vec![2], pairs: vec![[0, 1]] })),
        (
            "symmetric.json",
            analytic_file(AnalyticSpec::SymmetricSum { input_shape: vec![4], g: symmetric_sum().function().clone() }),
        ),
        ("bump.json", bump_file(&smooth_bumps())),
        ("offpath.json", bump_file(&off_path_bump())),
        ("bump64.json", bump_file(&bump_family(0))),
        ("bumpy.json", network_file(&bumpy_mlp(0))),
        ("relu.json", network_file(&relu_mlp())),
        ("ones.pgm", encode(&ones_image())),
        ("ramp.ppm", encode(&ramp_image())),
        ("mask.pgm", encode(&half_mask().to_image())),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmodel::{check_gradient, parse_model, Target};

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(bump_family(1), bump_family(1));
        assert_ne!(bump_family(1), bump_family(2));
        assert_eq!(bumpy_mlp(0), bumpy_mlp(0));
        assert_eq!(bundle(), bundle());
    }

    #[test]
    fn bundled_models_reload_identically() {
        let x = uniform_point(64, 3, 0, 0.0, 1.0);
        let reloaded = parse_model(std::str::from_utf8(&bump_file(&bump_family(0))).unwrap()).unwrap();
        assert_eq!(reloaded.forward(x.values()), bump_family(0).forward(x.values()));
        let bumpy = parse_model(std::str::from_utf8(&network_file(&bumpy_mlp(0))).unwrap()).unwrap();
        let x8 = uniform_point(8, 3, 0, 0.0, 1.0);
        assert_eq!(bumpy.forward(x8.values()), bumpy_mlp(0).forward(x8.values()));
    }

    #[test]
    fn tied_columns_give_equal_gradients() {
        let (m, pairs) = tied_mlp(4);
        assert_eq!(pairs.len(), 3);
        let mut x = uniform_point(6, 4, 0, 0.0, 1.0).into_values();
        for &(i, j) in &pairs {
            x[j] = x[i];
        }
        let g = crate::diffmodel::gradient_raw(&m, &x, Target::softmax(1)).unwrap().gradient;
        for &(i, j) in &pairs {
            assert_eq!(g[i], g[j]);
        }
        let fv = FeatureVector::flat(x).unwrap();
        assert!(check_gradient(&m, &fv, Target::softmax(1), 1e-4).unwrap() < 1e-4);
    }

    #[test]
    fn off_path_bump_gradient_is_orthogonal_at_the_midpoint() {
        let g = crate::diffmodel::gradient_raw(&off_path_bump(), &[0.5, 0.0], Target::logit(0)).unwrap().gradient;
        assert_eq!(g[0], 0.0);
        assert!(g[1] > 1.0);
    }
}
