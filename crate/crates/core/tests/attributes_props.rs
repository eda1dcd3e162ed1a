use photocraft::attributes::{attribute_delta, measure_attributes, AttributeKind, MAX_CCT_MIRED, MIN_CCT_MIRED};
use photocraft::procedural::natural_image;
use photocraft::retouch::apply_exposure;
use photocraft::Image;
use proptest::prelude::*;

fn image_strategy() -> impl Strategy<Value = Image> {
    (1usize..10, 1usize..10).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f32..=1.0, w * h * 3).prop_map(move |data| Image::new(w, h, data).unwrap())
    })
}

proptest! {
    #[test]
    fn fields_respect_ranges(img in image_strategy()) {
        let a = measure_attributes(&img);
        prop_assert!((0.0..=1.0).contains(&a.exposure));
        prop_assert!((0.0..=0.5).contains(&a.contrast));
        prop_assert!((0.0..=1.0).contains(&a.saturation));
        prop_assert!((MIN_CCT_MIRED..=MAX_CCT_MIRED).contains(&a.cct_mired));
    }

    #[test]
    fn delta_is_antisymmetric(a in image_strategy(), seed in any::<u64>()) {
        let b = natural_image(seed, a.width(), a.height());
        prop_assert_eq!(attribute_delta(&a, &b), -attribute_delta(&b, &a));
        prop_assert!(attribute_delta(&a, &a).is_zero());
    }
}

#[test]
fn exposure_edits_are_disentangled_from_saturation() {
    for seed in 0..20 {
        // neutral-dominant: desaturate a natural image towards gray
        let img = natural_image(500 + seed, 32, 24).map_pixels(|[r, g, b]| {
            let m = (r + g + b) / 3.0;
            [m + 0.2 * (r - m), m + 0.2 * (g - m), m + 0.2 * (b - m)]
        });
        let d = attribute_delta(&apply_exposure(&img, 0.5).unwrap(), &img);
        assert!(
            d.get(AttributeKind::Exposure).abs() >= 3.0 * d.get(AttributeKind::Saturation).abs(),
            "seed {seed}: {d:?}"
        );
    }
}
