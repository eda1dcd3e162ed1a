//! Keyword grammar for edit suggestions.
//!
//! Accepted shapes (case-insensitive, `[x]` optional):
//!
//! ```text
//! [adverb] verb [the] attribute [adverb]          moderately increase light&exposure
//! [a] adjective verb-noun in|of [the] attribute   a slight increase in exposure
//! change [the] color temperature to [adverb] warmer|cooler
//! make [the image] [adverb] warmer|cooler
//! [adverb] enhance|reduce [the] bokeh [effect]    depth of field, inverted
//! remove [the] degradation | deblur | dehaze | ...
//! ```
//!
//! A trailing parenthetical must restate the same depth-of-field edit, as in
//! "slightly decrease the depth of field (enhance the bokeh effect)".

use std::collections::HashSet;
use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

use super::{Direction, EditSuggestion, Magnitude, RestoreTask, Retouch, RetouchAttribute, SuggestionError};

/// A parsed suggestion with the byte range it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub suggestion: EditSuggestion,
    pub span: Range<usize>,
    pub source: String,
}

/// Vocabulary tables. [`Grammar::default`] holds the shipped synonyms;
/// callers can add more.
#[derive(Debug, Clone)]
pub struct Grammar {
    attributes: Vec<(Vec<String>, RetouchAttribute)>,
    degradations: Vec<(Vec<String>, RestoreTask)>,
    restore_phrases: Vec<(Vec<String>, RestoreTask)>,
}

fn table<T: Copy>(entries: &[(&str, T)]) -> Vec<(Vec<String>, T)> {
    entries.iter().map(|(p, t)| (words(p), *t)).collect()
}

fn words(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(str::to_owned).collect()
}

impl Default for Grammar {
    fn default() -> Self {
        use RestoreTask::*;
        use RetouchAttribute::*;
        let attributes = [
            ("light&exposure", Exposure),
            ("exposure", Exposure),
            ("brightness", Exposure),
            ("contrast", Contrast),
            ("saturation", Saturation),
            ("color saturation", Saturation),
            ("vibrance", Saturation),
            ("color temperature", Cct),
            ("white balance", Cct),
            ("depth of field", Dof),
            ("depth-of-field", Dof),
            ("dof", Dof),
        ];
        let degradations = [
            ("blur", Deblur),
            ("motion blur", Deblur),
            ("haze", Dehaze),
            ("fog", Dehaze),
            ("noise", Denoise),
            ("moire", Demoire),
            ("moiré", Demoire),
            ("shadow", Deshadow),
            ("shadows", Deshadow),
            ("rain", Derain),
            ("rain streaks", Derain),
        ];
        let restore_phrases = [
            ("deblur", Deblur),
            ("dehaze", Dehaze),
            ("denoise", Denoise),
            ("demoire", Demoire),
            ("deshadow", Deshadow),
            ("derain", Derain),
            ("enhance low light", Lowlight),
            ("enhance low-light", Lowlight),
            ("enhance lowlight", Lowlight),
            ("brighten low light", Lowlight),
            ("low-light enhancement", Lowlight),
            ("low light enhancement", Lowlight),
        ];
        Self {
            attributes: table(&attributes),
            degradations: table(&degradations),
            restore_phrases: table(&restore_phrases),
        }
    }
}

fn adverb(w: &str) -> Option<Magnitude> {
    match w {
        "slightly" => Some(Magnitude::Slight),
        "moderately" => Some(Magnitude::Moderate),
        "strongly" | "significantly" | "substantially" | "greatly" => Some(Magnitude::Strong),
        _ => None,
    }
}

fn adjective(w: &str) -> Option<Magnitude> {
    match w {
        "slight" => Some(Magnitude::Slight),
        "moderate" => Some(Magnitude::Moderate),
        "strong" | "significant" | "substantial" => Some(Magnitude::Strong),
        _ => None,
    }
}

/// `Some(true)` for verbs that raise the named attribute.
fn verb(w: &str) -> Option<bool> {
    match w {
        "increase" | "raise" | "boost" => Some(true),
        "decrease" | "reduce" | "lower" => Some(false),
        _ => None,
    }
}

fn bokeh_verb(w: &str) -> Option<bool> {
    match w {
        "enhance" | "strengthen" | "increase" | "boost" => Some(true),
        "reduce" | "weaken" | "decrease" | "lower" => Some(false),
        _ => None,
    }
}

fn cct_direction(w: &str) -> Option<Direction> {
    match w {
        "warmer" => Some(Direction::Warmer),
        "cooler" => Some(Direction::Cooler),
        _ => None,
    }
}

fn strip_the<'a>(w: &'a [&'a str]) -> &'a [&'a str] {
    match w.first() {
        Some(&"the") => &w[1..],
        _ => w,
    }
}

fn join_magnitude(a: Option<Magnitude>, b: Option<Magnitude>) -> Result<Magnitude, String> {
    match (a, b) {
        (Some(_), Some(_)) => Err("magnitude given twice".into()),
        (a, b) => Ok(a.or(b).unwrap_or(Magnitude::Unspecified)),
    }
}

fn retouch(attribute: RetouchAttribute, direction: Direction, magnitude: Magnitude) -> Result<EditSuggestion, String> {
    Retouch::new(attribute, direction, magnitude).map(EditSuggestion::Retouch).map_err(|e| e.to_string())
}

/// Lowercase, unify spelling variants and the "light & exposure" spacing.
fn normalize(text: &str) -> String {
    let lower = text.to_lowercase().replace("colour", "color");
    AMPERSAND.replace_all(&lower, "&").into_owned()
}

static AMPERSAND: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s*&\s*").expect("static regex"));
static NUMBER_MARKER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:^|\s)\d{1,3}[.)](?:\s|$)").expect("static regex"));
static SEPARATOR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)[;,\n]|\band\b").expect("static regex"));

/// Byte ranges of individual suggestions in a list.
fn split_items(text: &str) -> Vec<Range<usize>> {
    let mut segments = Vec::new();
    let mut start = 0;
    for m in NUMBER_MARKER.find_iter(text) {
        segments.push(start..m.start());
        start = m.end();
    }
    segments.push(start..text.len());

    let mut items = Vec::new();
    for seg in segments {
        let mut from = seg.start;
        let body = &text[seg.clone()];
        let mut cuts: Vec<Range<usize>> =
            SEPARATOR.find_iter(body).map(|m| seg.start + m.start()..seg.start + m.end()).collect();
        cuts.push(seg.end..seg.end);
        for cut in cuts {
            if let Some(r) = trim_range(text, from..cut.start) {
                items.push(r);
            }
            from = cut.end;
        }
    }
    items
}

fn trim_range(text: &str, r: Range<usize>) -> Option<Range<usize>> {
    let s = &text[r.clone()];
    let lead = s.len() - s.trim_start().len();
    let trimmed = s.trim().trim_end_matches(['.', ':', '!']).trim_end();
    (!trimmed.is_empty()).then(|| r.start + lead..r.start + lead + trimmed.len())
}

impl Grammar {
    pub fn with_attribute_synonym(mut self, phrase: &str, attribute: RetouchAttribute) -> Self {
        self.attributes.push((words(&normalize(phrase)), attribute));
        self
    }

    pub fn with_restore_synonym(mut self, phrase: &str, task: RestoreTask) -> Self {
        self.restore_phrases.push((words(&normalize(phrase)), task));
        self
    }

    fn lookup<T: Copy>(table: &[(Vec<String>, T)], w: &[&str]) -> Option<T> {
        table.iter().find(|(p, _)| p.len() == w.len() && p.iter().zip(w).all(|(a, b)| a == b)).map(|(_, t)| *t)
    }

    /// Longest attribute phrase that prefixes `w`.
    fn attribute_prefix(&self, w: &[&str]) -> Option<(RetouchAttribute, usize)> {
        self.attributes
            .iter()
            .filter(|(p, _)| p.len() <= w.len() && p.iter().zip(w).all(|(a, b)| a == b))
            .max_by_key(|(p, _)| p.len())
            .map(|(p, a)| (*a, p.len()))
    }

    fn parse_bokeh(w: &[&str], enhance: bool, magnitude: Magnitude) -> Option<EditSuggestion> {
        let rest = strip_the(w);
        if rest != ["bokeh"] && rest != ["bokeh", "effect"] {
            return None;
        }
        let direction = if enhance { Direction::Decrease } else { Direction::Increase };
        Some(EditSuggestion::retouch(RetouchAttribute::Dof, direction, magnitude))
    }

    fn parse_words(&self, w: &[&str]) -> Result<EditSuggestion, String> {
        if w.is_empty() {
            return Err("empty suggestion".into());
        }
        if w[0] == "remove" {
            return Self::lookup(&self.degradations, strip_the(&w[1..]))
                .map(EditSuggestion::Restore)
                .ok_or_else(|| format!("unknown degradation {:?}", w[1..].join(" ")));
        }
        if let Some(task) = Self::lookup(&self.restore_phrases, w) {
            return Ok(EditSuggestion::Restore(task));
        }

        let lead = adverb(w[0]);
        let w = if lead.is_some() { &w[1..] } else { w };
        let Some((&head, rest)) = w.split_first() else {
            return Err("missing verb".into());
        };

        // bare "warmer" / "slightly cooler"
        if let (Some(direction), true) = (cct_direction(head), rest.is_empty()) {
            return retouch(RetouchAttribute::Cct, direction, join_magnitude(lead, None)?);
        }

        if matches!(head, "change" | "adjust" | "shift" | "set") {
            let rest = strip_the(rest);
            let tail = match rest {
                ["color", "temperature", "to", tail @ ..] => tail,
                ["white", "balance", "to", tail @ ..] => tail,
                _ => return Err(format!("expected \"{head} color temperature to ...\"")),
            };
            return self.parse_cct_tail(tail, lead);
        }

        if head == "make" {
            let objects = ["the", "image", "photo", "it", "tones", "colors"];
            let skip = rest.iter().take_while(|t| objects.contains(t)).count();
            return self.parse_cct_tail(&rest[skip..], lead);
        }

        if let Some(up) = bokeh_verb(head) {
            if let Some(s) = Self::parse_bokeh(rest, up, join_magnitude(lead, None)?) {
                return Ok(s);
            }
        }

        if let Some(up) = verb(head) {
            return self.parse_attribute_tail(rest, up, lead);
        }

        // "a slight increase in exposure"
        let w = match w {
            ["a" | "an", tail @ ..] => tail,
            _ => w,
        };
        if let [adj, noun, prep, tail @ ..] = w {
            if let (Some(m), Some(up), true) = (adjective(adj), verb(noun), matches!(*prep, "in" | "of")) {
                return self.parse_attribute_tail(tail, up, join_magnitude(lead, Some(m)).map(Some)?);
            }
        }
        Err(format!("unrecognized phrasing starting at {head:?}"))
    }

    fn parse_cct_tail(&self, tail: &[&str], lead: Option<Magnitude>) -> Result<EditSuggestion, String> {
        let (mid, direction) = match tail {
            [m, d] => (adverb(m).map(Some).ok_or_else(|| format!("unexpected {m:?}"))?, cct_direction(d)),
            [d] => (None, cct_direction(d)),
            _ => (None, None),
        };
        let direction = direction.ok_or("expected warmer or cooler")?;
        retouch(RetouchAttribute::Cct, direction, join_magnitude(lead, mid)?)
    }

    fn parse_attribute_tail(&self, rest: &[&str], up: bool, lead: Option<Magnitude>) -> Result<EditSuggestion, String> {
        let rest = strip_the(rest);
        let (attribute, used) =
            self.attribute_prefix(rest).ok_or_else(|| format!("unknown attribute {:?}", rest.join(" ")))?;
        let trailing = match &rest[used..] {
            [] => None,
            [a] => Some(adverb(a).ok_or_else(|| format!("unexpected trailing {a:?}"))?),
            more => return Err(format!("unexpected trailing {:?}", more.join(" "))),
        };
        if attribute == RetouchAttribute::Cct {
            return Err("color temperature takes warmer or cooler, not increase or decrease".into());
        }
        let direction = if up { Direction::Increase } else { Direction::Decrease };
        retouch(attribute, direction, join_magnitude(lead, trailing)?)
    }

    fn parse_phrase(&self, text: &str) -> Result<EditSuggestion, String> {
        let norm = normalize(text);
        let norm = norm.trim().trim_end_matches(['.', ';', ',', ':', '!']).trim_end();
        let (main, paren) = match (norm.find('('), norm.ends_with(')')) {
            (Some(open), true) => (norm[..open].trim_end(), Some(&norm[open + 1..norm.len() - 1])),
            (None, false) => (norm, None),
            _ => return Err("unbalanced parenthesis".into()),
        };
        let main_words: Vec<&str> = main.split_whitespace().collect();
        let parsed = self.parse_words(&main_words)?;
        if let Some(p) = paren {
            let p_words: Vec<&str> = p.split_whitespace().collect();
            let restated = self.parse_words(&p_words)?;
            let consistent = match (parsed.as_retouch(), restated.as_retouch()) {
                (Some(a), Some(b)) => {
                    a.attribute() == b.attribute()
                        && a.direction() == b.direction()
                        && (b.magnitude() == Magnitude::Unspecified || b.magnitude() == a.magnitude())
                }
                _ => false,
            };
            if !consistent {
                return Err(format!("parenthetical {p:?} contradicts the main phrase"));
            }
        }
        Ok(parsed)
    }

    /// Parse one suggestion.
    pub fn parse(&self, text: &str) -> Result<EditSuggestion, SuggestionError> {
        let span = trim_range(text, 0..text.len()).unwrap_or(0..text.len());
        self.parse_phrase(text).map_err(|reason| SuggestionError::UnparseableSuggestion {
            text: text[span.clone()].to_owned(),
            span,
            reason,
        })
    }

    /// Parse a list separated by numbered markers, semicolons, commas,
    /// newlines or "and", keeping each item's byte range.
    pub fn parse_list_spanned(&self, text: &str) -> Result<Vec<Spanned>, SuggestionError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for span in split_items(text) {
            let source = &text[span.clone()];
            let suggestion = self.parse_phrase(source).map_err(|reason| SuggestionError::UnparseableSuggestion {
                text: source.to_owned(),
                span: span.clone(),
                reason,
            })?;
            if !seen.insert(suggestion.target_name()) {
                return Err(SuggestionError::DuplicateAttribute { name: suggestion.target_name().to_owned(), span });
            }
            out.push(Spanned { suggestion, span, source: source.to_owned() });
        }
        Ok(out)
    }

    pub fn parse_list(&self, text: &str) -> Result<Vec<EditSuggestion>, SuggestionError> {
        Ok(self.parse_list_spanned(text)?.into_iter().map(|s| s.suggestion).collect())
    }
}

static DEFAULT_GRAMMAR: LazyLock<Grammar> = LazyLock::new(Grammar::default);

/// Parse one suggestion with the default vocabulary.
pub fn parse_suggestion(text: &str) -> Result<EditSuggestion, SuggestionError> {
    DEFAULT_GRAMMAR.parse(text)
}

/// Parse a suggestion list with the default vocabulary.
pub fn parse_suggestion_list(text: &str) -> Result<Vec<EditSuggestion>, SuggestionError> {
    DEFAULT_GRAMMAR.parse_list(text)
}

pub fn parse_suggestion_list_spanned(text: &str) -> Result<Vec<Spanned>, SuggestionError> {
    DEFAULT_GRAMMAR.parse_list_spanned(text)
}

fn adverb_word(m: Magnitude) -> Option<&'static str> {
    match m {
        Magnitude::Slight => Some("slightly"),
        Magnitude::Moderate => Some("moderately"),
        Magnitude::Strong => Some("strongly"),
        Magnitude::Unspecified => None,
    }
}

/// Canonical phrasing of one suggestion.
pub fn render_suggestion(s: &EditSuggestion) -> String {
    match s {
        EditSuggestion::Restore(task) => match task {
            RestoreTask::Deblur => "remove blur",
            RestoreTask::Dehaze => "remove haze",
            RestoreTask::Denoise => "remove noise",
            RestoreTask::Demoire => "remove moire",
            RestoreTask::Deshadow => "remove shadow",
            RestoreTask::Lowlight => "enhance low light",
            RestoreTask::Derain => "remove rain",
        }
        .to_owned(),
        EditSuggestion::Retouch(r) => {
            let adv = adverb_word(r.magnitude());
            let mut parts: Vec<&str> = Vec::new();
            if r.attribute() == RetouchAttribute::Cct {
                parts.extend(["change", "color", "temperature", "to"]);
                parts.extend(adv);
                parts.push(r.direction().name());
            } else {
                parts.extend(adv);
                parts.push(r.direction().name());
                parts.push(match r.attribute() {
                    RetouchAttribute::Exposure => "exposure",
                    RetouchAttribute::Contrast => "contrast",
                    RetouchAttribute::Saturation => "saturation",
                    RetouchAttribute::Dof => "depth of field",
                    RetouchAttribute::Cct => unreachable!(),
                });
            }
            parts.join(" ")
        }
    }
}

/// Canonical instruction text: "a, b and c".
pub fn render_instruction(suggestions: &[EditSuggestion]) -> String {
    let parts: Vec<String> = suggestions.iter().map(render_suggestion).collect();
    match parts.split_last() {
        None => String::new(),
        Some((last, [])) => last.clone(),
        Some((last, init)) => format!("{} and {last}", init.join(", ")),
    }
}
