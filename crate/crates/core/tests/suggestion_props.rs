use photocraft::suggestion::{Direction, Magnitude, RestoreTask, RetouchAttribute};
use photocraft::{parse_suggestion, parse_suggestion_list, render_instruction, validate_critic_output, EditSuggestion};
use proptest::prelude::*;

fn retouch(attribute: RetouchAttribute) -> impl Strategy<Value = EditSuggestion> {
    let directions = if attribute == RetouchAttribute::Cct {
        vec![Direction::Warmer, Direction::Cooler]
    } else {
        vec![Direction::Increase, Direction::Decrease]
    };
    (prop::sample::select(directions), prop::sample::select(Magnitude::ALL.to_vec()))
        .prop_map(move |(d, m)| EditSuggestion::retouch(attribute, d, m))
}

/// A duplicate-free list: at most one entry per attribute, plus at most one restoration.
fn list() -> impl Strategy<Value = Vec<EditSuggestion>> {
    let parts: Vec<BoxedStrategy<Option<EditSuggestion>>> =
        RetouchAttribute::ALL.into_iter().map(|a| prop::option::of(retouch(a)).boxed()).collect();
    let restore = prop::option::of(prop::sample::select(RestoreTask::ALL.to_vec()).prop_map(EditSuggestion::restore));
    (restore, parts, any::<prop::sample::Index>()).prop_map(|(r, parts, idx)| {
        let mut items: Vec<EditSuggestion> = parts.into_iter().flatten().collect();
        if !items.is_empty() {
            let n = items.len();
            items.rotate_left(idx.index(n));
        }
        r.into_iter().chain(items).collect()
    })
}

proptest! {
    #[test]
    fn render_parse_round_trip(items in list()) {
        let text = render_instruction(&items);
        prop_assert_eq!(parse_suggestion_list(&text).unwrap(), items);
    }

    #[test]
    fn single_round_trip(items in list()) {
        for s in items {
            prop_assert_eq!(parse_suggestion(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn parser_and_validator_are_total(text in "\\PC{0,300}") {
        let _ = parse_suggestion_list(&text);
        let _ = validate_critic_output(&text);
    }
}
