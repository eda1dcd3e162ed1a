use photocraft::color::{
    chromaticity_to_cct, estimate_white_chromaticity, lab_pixel_to_srgb, lab_to_rgb, linear_to_srgb, rgb_to_lab,
    srgb_pixel_to_lab, srgb_to_linear,
};
use photocraft::procedural::natural_image;
use photocraft::{Chromaticity, Image};
use proptest::prelude::*;

fn image_strategy() -> impl Strategy<Value = Image> {
    (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f32..=1.0, w * h * 3).prop_map(move |data| Image::new(w, h, data).unwrap())
    })
}

proptest! {
    #[test]
    fn eotf_round_trip(c in 0.0f64..=1.0) {
        prop_assert!((linear_to_srgb(srgb_to_linear(c)) - c).abs() < 1e-12);
    }

    #[test]
    fn pixel_lab_round_trip(r in 0.0f64..=1.0, g in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let back = lab_pixel_to_srgb(srgb_pixel_to_lab([r, g, b], &Chromaticity::D65), &Chromaticity::D65);
        for (x, y) in back.iter().zip([r, g, b]) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn image_lab_round_trip(img in image_strategy()) {
        let back = lab_to_rgb(&rgb_to_lab(&img, &Chromaticity::D65), &Chromaticity::D65);
        prop_assert!(img.max_abs_diff(&back) < 1e-3);
        prop_assert_eq!((back.width(), back.height()), (img.width(), img.height()));
    }

    #[test]
    fn lightness_in_range(img in image_strategy()) {
        for l in rgb_to_lab(&img, &Chromaticity::D65).lightness() {
            prop_assert!((0.0..=100.0 + 1e-9).contains(&l));
        }
    }

    #[test]
    fn cct_of_natural_images_is_in_range(seed in any::<u64>()) {
        let img = natural_image(seed, 16, 12);
        let kelvin = chromaticity_to_cct(&estimate_white_chromaticity(&img).unwrap()).unwrap();
        prop_assert!((1500.0..=40000.0).contains(&kelvin));
    }
}
