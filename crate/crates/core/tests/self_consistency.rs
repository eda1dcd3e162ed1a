use photocraft::attributes::{attribute_delta, AttributeKind};
use photocraft::datagen::{generate_reference, synthesize_pair, SynthesisPlan};
use photocraft::procedural::natural_image;
use photocraft::rewards::{suggestion_exploration_reward, RewardConfig};
use photocraft::{parse_suggestion_list, EditSuggestion, MagnitudeTable};

#[test]
fn synthesized_pairs_are_recoverable() {
    let (table, cfg) = (MagnitudeTable::default(), RewardConfig::default());
    let plan = SynthesisPlan { master_seed: 2024, ..Default::default() };
    let mut recovered = 0;
    for index in 0..100u64 {
        let gt = natural_image(index, 48, 36);
        let s = synthesize_pair(&gt, &plan, &table, index).unwrap();
        let suggestions = parse_suggestion_list(&s.record.instruction).unwrap();
        let reference = generate_reference(&s.input, &suggestions, &table).unwrap();
        let d = attribute_delta(&reference.image, &gt);
        let ok = AttributeKind::ALL.iter().all(|k| d.get(*k).abs() <= 2.0 * cfg.tau.get(*k));
        let r = suggestion_exploration_reward(&s.input, &gt, &suggestions, None, &cfg, &table).unwrap();
        if !ok || r.reward < 0.9 {
            eprintln!("{index}: {:?} {:?} d={d:?} r={}", s.record.instruction, s.record.params, r.reward);
        }
        recovered += usize::from(ok && r.reward >= 0.9);
    }
    assert!(recovered >= 95, "{recovered}");
}

#[test]
fn multi_edit_instructions_round_trip_and_invert() {
    use photocraft::datagen::synthesize_multi_edit;
    use photocraft::render_instruction;
    use photocraft::suggestion::RestoreTask;

    let (table, cfg) = (MagnitudeTable::default(), RewardConfig::default());
    let plan = SynthesisPlan { master_seed: 77, ..Default::default() };
    let labels = ["blur", "haze", "moire", "rain", "noise"];
    for index in 0..30u64 {
        let label = labels[index as usize % labels.len()];
        let degraded = natural_image(9000 + index, 40, 30);
        let s = synthesize_multi_edit(&degraded, label, &plan, &table, index).unwrap();
        let suggestions = parse_suggestion_list(&s.record.instruction).unwrap();
        assert_eq!(render_instruction(&suggestions), s.record.instruction);
        let task = RestoreTask::from_label(label).unwrap();
        assert_eq!(suggestions[0].restore_task(), Some(task));
        let reference = generate_reference(&s.input, &suggestions, &table).unwrap();
        let d = attribute_delta(&reference.image, &degraded);
        for k in AttributeKind::ALL {
            assert!(d.get(k).abs() <= 2.0 * cfg.tau.get(k), "{index} {k}: {d:?}");
        }
        let ok = suggestion_exploration_reward(&s.input, &degraded, &suggestions, Some(task), &cfg, &table).unwrap();
        assert!(ok.reward >= 0.9, "{index}: {ok:?}");
        let other = if task == RestoreTask::Dehaze { RestoreTask::Deblur } else { RestoreTask::Dehaze };
        let mismatch =
            suggestion_exploration_reward(&s.input, &degraded, &suggestions, Some(other), &cfg, &table).unwrap();
        assert_eq!(mismatch.reward, 0.0);
    }
}

#[test]
fn exploration_reward_edge_cases() {
    use photocraft::rewards::RewardError;
    use photocraft::suggestion::RestoreTask;

    let (table, cfg) = (MagnitudeTable::default(), RewardConfig::default());
    let x = natural_image(1, 24, 18);
    let restore_only = [EditSuggestion::restore(RestoreTask::Deblur)];
    let r = suggestion_exploration_reward(&x, &x, &restore_only, Some(RestoreTask::Deblur), &cfg, &table).unwrap();
    assert_eq!(r.restore_factor, 1.0);
    assert_eq!(r.reward, 1.0);
    let r = suggestion_exploration_reward(&x, &x, &[], Some(RestoreTask::Deblur), &cfg, &table).unwrap();
    assert_eq!(r.restore_factor, 0.0);
    let haze = [EditSuggestion::restore(RestoreTask::Dehaze)];
    let r = suggestion_exploration_reward(&x, &x, &haze, Some(RestoreTask::Deblur), &cfg, &table).unwrap();
    assert_eq!(r.reward, 0.0);
    assert!(matches!(
        suggestion_exploration_reward(&x, &x, &restore_only, None, &cfg, &table),
        Err(RewardError::NoApplicableSuggestion)
    ));
    assert!(matches!(
        suggestion_exploration_reward(&x, &x, &[], None, &cfg, &table),
        Err(RewardError::NoApplicableSuggestion)
    ));
}
