//! Validation of the critic's structured output: a reasoning block with five
//! numbered analyses, an edit-suggestion block, and a score line
//! `Predicted Score: N/100`, in that order.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use super::grammar::parse_suggestion_list_spanned;
use super::EditSuggestion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Reasoning,
    Suggestions,
    Score,
}

impl BlockKind {
    const ORDER: [BlockKind; 3] = [Self::Reasoning, Self::Suggestions, Self::Score];
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Reasoning => "reasoning",
            Self::Suggestions => "suggestions",
            Self::Score => "score",
        })
    }
}

/// Titles of the five analysis sections, in template order.
pub const SECTION_TITLES: [&str; 5] = [
    "Image Quality/Degradations Analysis",
    "Color Performance&Lighting Analysis",
    "Composition&Layout Analysis",
    "Aesthetic Impression Analysis",
    "Comprehensive Evaluation",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReasoningSection {
    pub index: usize,
    pub title: String,
    pub body: String,
}

/// Structured critic output: reasoning, suggestions, score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticOutput {
    pub reasoning: Vec<ReasoningSection>,
    /// Suggestion source strings, in order.
    pub suggestions: Vec<String>,
    pub parsed_suggestions: Vec<EditSuggestion>,
    pub score: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum FormatViolation {
    MissingBlock { block: BlockKind },
    DuplicateBlock { block: BlockKind, line: usize },
    OutOfOrder { found: Vec<BlockKind> },
    MissingSection { index: usize, title: String },
    SectionsOutOfOrder,
    EmptySuggestions,
    BadSuggestion { message: String },
    MissingScore,
    MultipleScores { lines: Vec<usize> },
    MalformedScore { line: usize, text: String },
    ScoreOutOfRange { value: i64 },
    ScoreOutsideScoreBlock { line: usize },
}

impl fmt::Display for FormatViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingBlock { block } => write!(f, "missing {block} block"),
            Self::DuplicateBlock { block, line } => write!(f, "second {block} header at line {line}"),
            Self::OutOfOrder { found } => {
                let names: Vec<String> = found.iter().map(ToString::to_string).collect();
                write!(f, "blocks out of order: {}", names.join(" -> "))
            }
            Self::MissingSection { index, title } => write!(f, "missing section {index}. {title}"),
            Self::SectionsOutOfOrder => write!(f, "reasoning sections out of order"),
            Self::EmptySuggestions => write!(f, "suggestion block is empty"),
            Self::BadSuggestion { message } => write!(f, "bad suggestion: {message}"),
            Self::MissingScore => write!(f, "no \"Predicted Score: N/100\" line"),
            Self::MultipleScores { lines } => write!(f, "score given on several lines: {lines:?}"),
            Self::MalformedScore { line, text } => write!(f, "malformed score at line {line}: {text:?}"),
            Self::ScoreOutOfRange { value } => write!(f, "score {value} outside [0, 100]"),
            Self::ScoreOutsideScoreBlock { line } => {
                write!(f, "score line {line} is outside the scoring block")
            }
        }
    }
}

/// Letters and digits only, lowercased: "Color Performance & Lighting" and
/// "Color Performance&Lighting" compare equal.
fn squash(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

fn header_kind(line: &str) -> Option<BlockKind> {
    let t = line.trim().trim_start_matches('#').trim_matches('*').trim();
    if t.is_empty() || t.len() > 60 || t.to_lowercase().contains("predicted score") {
        return None;
    }
    match squash(t).as_str() {
        "imagequalityaestheticreasoning" | "imagequalityandaestheticreasoning" | "reasoning" => {
            Some(BlockKind::Reasoning)
        }
        "editsuggestions" | "suggestions" => Some(BlockKind::Suggestions),
        "imagequalityscoring" | "scoring" | "score" => Some(BlockKind::Score),
        _ => None,
    }
}

static SCORE_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\s*predicted\s+score\s*:\s*(-?\d+)\s*/\s*100\s*(?:\\\\)?\s*$").expect("static regex")
});
static SECTION_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(\d+)\.\s*([^:]+):(.*)$").expect("static regex"));

/// Check `text` against the template. Never panics; format problems are
/// returned as data.
pub fn validate_critic_output(text: &str) -> Result<CriticOutput, Vec<FormatViolation>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut violations = Vec::new();

    // Header positions, in text order.
    let headers: Vec<(usize, BlockKind)> =
        lines.iter().enumerate().filter_map(|(i, l)| header_kind(l).map(|k| (i, k))).collect();
    let mut first: Vec<(BlockKind, usize)> = Vec::new();
    for &(line, kind) in &headers {
        if first.iter().any(|(k, _)| *k == kind) {
            violations.push(FormatViolation::DuplicateBlock { block: kind, line: line + 1 });
        } else {
            first.push((kind, line));
        }
    }
    for kind in BlockKind::ORDER {
        if !first.iter().any(|(k, _)| *k == kind) {
            violations.push(FormatViolation::MissingBlock { block: kind });
        }
    }
    let found: Vec<BlockKind> = first.iter().map(|(k, _)| *k).collect();
    let expected: Vec<BlockKind> = BlockKind::ORDER.into_iter().filter(|k| found.contains(k)).collect();
    if found != expected {
        violations.push(FormatViolation::OutOfOrder { found });
    }

    // Body of a block: lines after its header up to the next header.
    let body = |kind: BlockKind| -> Option<(usize, usize)> {
        let (_, start) = first.iter().find(|(k, _)| *k == kind)?;
        let end = headers.iter().map(|(l, _)| *l).find(|l| l > start).unwrap_or(lines.len());
        Some((start + 1, end))
    };
    let score_lines: Vec<usize> = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.to_lowercase().contains("predicted score"))
        .map(|(i, _)| i)
        .collect();

    let reasoning = body(BlockKind::Reasoning).map(|(s, e)| check_sections(&lines[s..e], &mut violations));

    let mut sources = Vec::new();
    let mut parsed = Vec::new();
    if let Some((s, e)) = body(BlockKind::Suggestions) {
        let block: Vec<&str> =
            (s..e).filter(|i| !score_lines.contains(i)).map(|i| lines[i].trim().trim_end_matches("\\\\")).collect();
        match parse_suggestion_list_spanned(&block.join("\n")) {
            Ok(items) if items.is_empty() => violations.push(FormatViolation::EmptySuggestions),
            Ok(items) => {
                for item in items {
                    sources.push(item.source);
                    parsed.push(item.suggestion);
                }
            }
            Err(e) => violations.push(FormatViolation::BadSuggestion { message: e.to_string() }),
        }
    }

    let mut score = None;
    match score_lines.as_slice() {
        [] => violations.push(FormatViolation::MissingScore),
        [line] => {
            let in_block = body(BlockKind::Score).is_some_and(|(s, e)| (s..e).contains(line));
            if body(BlockKind::Score).is_some() && !in_block {
                violations.push(FormatViolation::ScoreOutsideScoreBlock { line: line + 1 });
            }
            match SCORE_LINE.captures(lines[*line]) {
                None => violations
                    .push(FormatViolation::MalformedScore { line: line + 1, text: lines[*line].trim().to_owned() }),
                Some(c) => match c[1].parse::<i64>() {
                    Ok(v @ 0..=100) => score = Some(v as u8),
                    Ok(v) => violations.push(FormatViolation::ScoreOutOfRange { value: v }),
                    Err(_) => violations.push(FormatViolation::ScoreOutOfRange { value: i64::MAX }),
                },
            }
        }
        many => violations.push(FormatViolation::MultipleScores { lines: many.iter().map(|l| l + 1).collect() }),
    }

    match (violations.is_empty(), reasoning, score) {
        (true, Some(reasoning), Some(score)) => {
            Ok(CriticOutput { reasoning, suggestions: sources, parsed_suggestions: parsed, score })
        }
        _ => Err(violations),
    }
}

fn check_sections(lines: &[&str], violations: &mut Vec<FormatViolation>) -> Vec<ReasoningSection> {
    // (line index, section number) for every expected-title marker
    let mut marks: Vec<(usize, usize)> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if let Some(c) = SECTION_LINE.captures(line) {
            let Ok(n) = c[1].parse::<usize>() else { continue };
            if (1..=5).contains(&n) && squash(&c[2]) == squash(SECTION_TITLES[n - 1]) {
                marks.push((i, n));
            }
        }
    }
    for (n, title) in SECTION_TITLES.iter().enumerate() {
        if !marks.iter().any(|(_, m)| *m == n + 1) {
            violations.push(FormatViolation::MissingSection { index: n + 1, title: (*title).to_owned() });
        }
    }
    if marks.windows(2).any(|w| w[0].1 >= w[1].1) {
        violations.push(FormatViolation::SectionsOutOfOrder);
    }

    marks
        .iter()
        .enumerate()
        .map(|(k, &(start, n))| {
            let end = marks.get(k + 1).map_or(lines.len(), |m| m.0);
            let head = SECTION_LINE.captures(lines[start]).map(|c| c[3].trim().to_owned()).unwrap_or_default();
            let mut body: Vec<&str> = vec![head.as_str()];
            body.extend(lines[start + 1..end].iter().map(|l| l.trim()));
            let body = body.into_iter().filter(|l| !l.is_empty()).collect::<Vec<_>>().join("\n");
            ReasoningSection { index: n, title: SECTION_TITLES[n - 1].to_owned(), body }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
Image Quality&Aesthetic Reasoning
1. Image Quality/Degradations Analysis: fine.
2. Color Performance&Lighting Analysis: dim.
3. Composition&Layout Analysis: centered.
4. Aesthetic Impression Analysis: calm.
5. Comprehensive Evaluation: brighten it.
Edit Suggestions
1. slightly increase light&exposure
Image Quality Scoring
Predicted Score: 64/100
";

    #[test]
    fn minimal_template_is_valid() {
        let out = validate_critic_output(MINIMAL).unwrap();
        assert_eq!(out.score, 64);
        assert_eq!(out.reasoning.len(), 5);
        assert_eq!(out.reasoning[1].body, "dim.");
        assert_eq!(out.suggestions, vec!["slightly increase light&exposure"]);
    }

    #[test]
    fn score_problems() {
        let v = validate_critic_output(&MINIMAL.replace("64/100", "101/100")).unwrap_err();
        assert_eq!(v, vec![FormatViolation::ScoreOutOfRange { value: 101 }]);
        let v = validate_critic_output(&MINIMAL.replace("64/100", "6.4/100")).unwrap_err();
        assert!(matches!(v[..], [FormatViolation::MalformedScore { .. }]));
        let v = validate_critic_output(&MINIMAL.replace("Predicted Score: 64/100\n", "")).unwrap_err();
        assert_eq!(v, vec![FormatViolation::MissingScore]);
        let doubled = format!("{MINIMAL}Predicted Score: 10/100\n");
        assert!(matches!(validate_critic_output(&doubled).unwrap_err()[..], [FormatViolation::MultipleScores { .. }]));
    }

    #[test]
    fn structural_problems() {
        let v =
            validate_critic_output(&MINIMAL.replace("3. Composition&Layout Analysis: centered.\n", "")).unwrap_err();
        assert!(matches!(&v[..], [FormatViolation::MissingSection { index: 3, .. }]));
        let v = validate_critic_output(&MINIMAL.replace("Edit Suggestions\n", "")).unwrap_err();
        assert!(v.contains(&FormatViolation::MissingBlock { block: BlockKind::Suggestions }));
        let v = validate_critic_output(&MINIMAL.replace("slightly increase light&exposure", "do something nice"))
            .unwrap_err();
        assert!(matches!(&v[..], [FormatViolation::BadSuggestion { .. }]));
        let v = validate_critic_output(&MINIMAL.replace("1. slightly increase light&exposure\n", "")).unwrap_err();
        assert_eq!(v, vec![FormatViolation::EmptySuggestions]);
    }

    #[test]
    fn total_on_junk() {
        for junk in
            ["", "\n\n", "Predicted Score: 5/100", "((((", "Edit Suggestions\nEdit Suggestions", "\u{0}\u{ffff}"]
        {
            assert!(validate_critic_output(junk).is_err());
        }
    }
}
