use photocraft::attributes::{measure_attributes, AttributeKind};
use photocraft::procedural::natural_image;
use photocraft::retouch::{
    apply_cct_shift, apply_contrast, apply_exposure, apply_saturation, apply_stack, RetouchError,
};
use photocraft::{Image, RetouchParams};
use proptest::prelude::*;

const CLIP_EXEMPTION: f64 = 0.3;

fn operator(kind: AttributeKind) -> fn(&Image, f64) -> Result<Image, RetouchError> {
    match kind {
        AttributeKind::Exposure => apply_exposure,
        AttributeKind::Contrast => apply_contrast,
        AttributeKind::Saturation => apply_saturation,
        AttributeKind::Cct => apply_cct_shift,
    }
}

fn sweep(kind: AttributeKind) -> &'static [f64] {
    match kind {
        AttributeKind::Exposure => &[-1.2, -0.7, -0.3, 0.0, 0.3, 0.7, 1.2],
        AttributeKind::Contrast | AttributeKind::Saturation => &[0.67, 0.8, 0.9, 1.0, 1.1, 1.25, 1.5],
        AttributeKind::Cct => &[-50.0, -25.0, -10.0, 0.0, 10.0, 25.0, 50.0],
    }
}

#[test]
fn attribute_responses_are_monotone() {
    for seed in 0..50 {
        let img = natural_image(1000 + seed, 40, 30);
        for kind in AttributeKind::ALL {
            let outputs: Vec<Image> = sweep(kind).iter().map(|&v| operator(kind)(&img, v).unwrap()).collect();
            for pair in outputs.windows(2) {
                let (lo, hi) = (measure_attributes(&pair[0]).get(kind), measure_attributes(&pair[1]).get(kind));
                let exempt = pair.iter().any(|o| o.clipped_fraction() >= CLIP_EXEMPTION);
                assert!(hi > lo || exempt, "seed {seed} {kind}: {lo} -> {hi}");
            }
        }
    }
}

fn params_strategy() -> impl Strategy<Value = RetouchParams> {
    (-1.5f64..1.5, 0.5f64..2.0, 0.0f64..2.0, -60.0f64..60.0)
        .prop_map(|(e, c, s, t)| RetouchParams::new(e, c, s, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stack_preserves_dimensions_and_is_deterministic(seed in any::<u64>(), w in 1usize..20, h in 1usize..20, p in params_strategy()) {
        let img = natural_image(seed, w, h);
        let a = apply_stack(&img, &p).unwrap();
        prop_assert_eq!((a.width(), a.height()), (w, h));
        prop_assert_eq!(a, apply_stack(&img, &p).unwrap());
    }

    #[test]
    fn identity_stack_is_exact(seed in any::<u64>()) {
        let img = natural_image(seed, 12, 9);
        prop_assert_eq!(apply_stack(&img, &RetouchParams::IDENTITY).unwrap(), img);
    }
}
