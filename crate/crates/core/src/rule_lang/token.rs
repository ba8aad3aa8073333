//! Tokenization and lemmatization for the controlled rule language.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

/// Coarse part-of-speech classes used by the rule grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Num,
    Percent,
    Pron,
    Adp,
    Det,
    Part,
    Aux,
    Other,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Num => "NUM",
            Pos::Percent => "PERCENT",
            Pos::Pron => "PRON",
            Pos::Adp => "ADP",
            Pos::Det => "DET",
            Pos::Part => "PART",
            Pos::Aux => "AUX",
            Pos::Other => "OTHER",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub text: String,
    pub lemma: String,
    pub pos: Pos,
    pub index: usize,
    /// Set by the tagger on comparative adjectives and adverbs ("closer", "more").
    pub comparative: bool,
}

impl Token {
    pub fn new(text: impl Into<String>, lemma: impl Into<String>, pos: Pos, index: usize) -> Self {
        Self {
            text: text.into(),
            lemma: lemma.into(),
            pos,
            index,
            comparative: false,
        }
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self.pos, Pos::Noun | Pos::Pron)
    }

    pub fn is_quantity(&self) -> bool {
        matches!(self.pos, Pos::Num | Pos::Percent)
    }

    /// Numeric value of a NUM/PERCENT token, without its unit.
    pub fn numeric_value(&self) -> Option<f64> {
        if !self.is_quantity() {
            return None;
        }
        let digits: String = self
            .text
            .chars()
            .take_while(|c| c.is_ascii_digit() || *c == '.')
            .collect();
        digits.parse().ok()
    }
}

/// Multiword expressions merged into a single token. The last word may be
/// inflected ("traffic signs"); earlier words must match exactly.
const MULTIWORDS: &[&str] = &[
    "stop and yield line",
    "speed limit sign",
    "slow speed sign",
    "in front of",
    "traffic sign",
    "traffic light",
    "stop sign",
    "yield sign",
    "lane line",
    "driving time",
    "steering angle",
    "steering wheel",
    "ego vehicle",
    "school bus",
    "speed limit",
    "zebra crossing",
];

const UNITS: &[&str] = &["km/h", "kmh", "kph", "mph", "m/s", "degree", "degrees", "deg"];

/// Words the lemmatizer leaves untouched.
const FROZEN: &[&str] = &[
    "is", "was", "has", "does", "this", "its", "his", "hers", "theirs", "less", "least", "across",
    "always", "always", "news", "bus", "gas", "lens", "dashed", "same", "closer", "faster",
    "slower", "nearer", "farther", "further", "more", "most", "speed", "red", "wed", "need",
    "during", "morning", "evening", "nothing", "something", "ceiling", "building", "crossing",
    "marking", "lighting", "parking", "steering", "driving",
];

const IRREGULAR: &[(&str, &str)] = &[
    ("are", "be"),
    ("is", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("am", "be"),
    ("has", "have"),
    ("had", "have"),
    ("does", "do"),
    ("did", "do"),
    ("done", "do"),
    ("got", "get"),
    ("gotten", "get"),
    ("went", "go"),
    ("gone", "go"),
    ("goes", "go"),
    ("became", "become"),
    ("drove", "drive"),
    ("driven", "drive"),
    ("kept", "keep"),
    ("people", "person"),
    ("men", "man"),
    ("women", "woman"),
    ("children", "child"),
    ("leaves", "leaf"),
    ("buses", "bus"),
    ("came", "come"),
    ("shown", "show"),
    ("ran", "run"),
];

/// Base forms the `-ed`/`-ing` restoration rules may produce.
const KNOWN_BASES: &[&str] = &[
    "add", "appear", "show", "emerge", "come", "place", "insert", "put", "remove", "disappear",
    "erase", "delete", "vanish", "replace", "change", "become", "turn", "transform", "convert",
    "switch", "swap", "slow", "decrease", "decelerate", "drop", "reduce", "brake", "stop",
    "increase", "accelerate", "speed", "rise", "raise", "keep", "maintain", "stay", "remain",
    "get", "move", "drive", "cross", "walk", "stand", "deviate", "steer", "go", "run", "make",
    "use", "dash", "park", "approach", "pass", "hide", "cover", "paint", "fade", "line", "build",
    "take", "shade", "rain", "snow",
];

fn known_bases() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| KNOWN_BASES.iter().copied().collect())
}

fn frozen() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| FROZEN.iter().copied().collect())
}

fn irregular() -> &'static HashMap<&'static str, &'static str> {
    static MAP: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    MAP.get_or_init(|| IRREGULAR.iter().copied().collect())
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn restore_stem(stem: &str) -> String {
    let known = known_bases();
    let with_e = format!("{stem}e");
    if known.contains(with_e.as_str()) {
        return with_e;
    }
    let chars: Vec<char> = stem.chars().collect();
    let doubled = chars.len() >= 2
        && chars[chars.len() - 1] == chars[chars.len() - 2]
        && !is_vowel(chars[chars.len() - 1]);
    if doubled {
        let undoubled: String = chars[..chars.len() - 1].iter().collect();
        if known.contains(undoubled.as_str()) || !matches!(chars[chars.len() - 1], 'l' | 's' | 'z')
        {
            return undoubled;
        }
    }
    stem.to_string()
}

/// Lowercase base form of a single word.
pub fn lemmatize(word: &str) -> String {
    let w = word.to_lowercase();
    if let Some(base) = irregular().get(w.as_str()) {
        return (*base).to_string();
    }
    if frozen().contains(w.as_str()) || known_bases().contains(w.as_str()) {
        return w;
    }
    if w.chars().count() <= 3 || !w.chars().all(|c| c.is_alphabetic() || c == '-') {
        return w;
    }
    let has_vowel = |s: &str| s.chars().any(is_vowel);
    if let Some(stem) = w.strip_suffix("ies") {
        if stem.len() >= 2 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = w.strip_suffix("ing") {
        if stem.len() >= 2 && has_vowel(stem) {
            return restore_stem(stem);
        }
    }
    if let Some(stem) = w.strip_suffix("ed") {
        if stem.len() >= 2 && has_vowel(stem) {
            return restore_stem(stem);
        }
    }
    if let Some(stem) = w.strip_suffix("es") {
        if ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s)) {
            return stem.to_string();
        }
    }
    if w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is") {
        return w[..w.len() - 1].to_string();
    }
    w
}

/// Lemma of a possibly multiword phrase: only the final word inflects.
pub fn lemmatize_phrase(words: &[&str]) -> String {
    match words.split_last() {
        None => String::new(),
        Some((last, init)) => {
            let mut parts: Vec<String> = init.iter().map(|w| w.to_lowercase()).collect();
            parts.push(lemmatize(last));
            parts.join(" ")
        }
    }
}

fn number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\d+(?:\.\d+)?$").unwrap())
}

fn percent_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\d+(?:\.\d+)?%$").unwrap())
}

fn attached_unit_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(\d+(?:\.\d+)?)(km/h|kmh|kph|mph|m/s|degrees|degree|deg)$").unwrap()
    })
}

fn strip_punct(raw: &str) -> &str {
    raw.trim_start_matches(['"', '\'', '(', '[', '{', '`'])
        .trim_end_matches(|c: char| {
            matches!(c, '.' | ',' | ';' | ':' | '!' | '?' | '"' | '\'' | ')' | ']' | '}' | '~')
        })
}

/// Raw words after punctuation stripping, with attached units split off.
fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split_whitespace() {
        let w = strip_punct(raw);
        if w.is_empty() {
            continue;
        }
        if let Some(caps) = attached_unit_re().captures(w) {
            out.push(caps[1].to_string());
            out.push(caps[2].to_string());
        } else {
            out.push(w.to_string());
        }
    }
    out
}

fn multiword_at(words: &[String], start: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for mw in MULTIWORDS {
        let parts: Vec<&str> = mw.split(' ').collect();
        let n = parts.len();
        if start + n > words.len() || best.is_some_and(|b| b >= n) {
            continue;
        }
        let window = &words[start..start + n];
        let init_ok = window[..n - 1]
            .iter()
            .zip(&parts[..n - 1])
            .all(|(w, p)| w.to_lowercase() == *p);
        let last = window[n - 1].to_lowercase();
        let last_ok = last == parts[n - 1] || lemmatize(&last) == parts[n - 1];
        if init_ok && last_ok {
            best = Some(n);
        }
    }
    best
}

/// Split a clause into tokens. Quantities ("30%", "10 km/h") and entries of
/// the multiword lexicon become single tokens. Parts of speech other than
/// NUM/PERCENT are left as OTHER for the tagger.
pub fn tokenize(text: &str) -> Vec<Token> {
    let words = words(text);
    let mut tokens = Vec::with_capacity(words.len());
    let mut i = 0;
    while i < words.len() {
        let w = &words[i];
        let index = tokens.len();
        if percent_re().is_match(w) {
            tokens.push(Token::new(w.clone(), w.clone(), Pos::Percent, index));
            i += 1;
            continue;
        }
        if number_re().is_match(w) {
            match words.get(i + 1).map(|n| n.to_lowercase()) {
                Some(next) if next == "%" => {
                    let text = format!("{w}%");
                    tokens.push(Token::new(text.clone(), text, Pos::Percent, index));
                    i += 2;
                }
                Some(next) if UNITS.contains(&next.as_str()) => {
                    let text = format!("{w} {}", words[i + 1]);
                    tokens.push(Token::new(text.clone(), text.to_lowercase(), Pos::Num, index));
                    i += 2;
                }
                _ => {
                    tokens.push(Token::new(w.clone(), w.clone(), Pos::Num, index));
                    i += 1;
                }
            }
            continue;
        }
        if let Some(n) = multiword_at(&words, i) {
            let parts: Vec<&str> = words[i..i + n].iter().map(String::as_str).collect();
            tokens.push(Token::new(
                parts.join(" "),
                lemmatize_phrase(&parts),
                Pos::Other,
                index,
            ));
            i += n;
            continue;
        }
        tokens.push(Token::new(w.clone(), lemmatize(w), Pos::Other, index));
        i += 1;
    }
    tokens
}

/// Render tokens back to text with single spaces.
pub fn render(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn simple_clause() {
        let toks = tokenize("a pedestrian appears on the roadside");
        assert_eq!(toks.len(), 6);
        assert_eq!(toks[2].lemma, "appear");
        assert!(toks.iter().enumerate().all(|(i, t)| t.index == i));
    }

    #[test]
    fn percent_is_one_token() {
        let toks = tokenize("slow down at least 30%");
        assert_eq!(texts(&toks), ["slow", "down", "at", "least", "30%"]);
        assert_eq!(toks[4].pos, Pos::Percent);
        assert_eq!(toks[4].numeric_value(), Some(30.0));
        let spaced = tokenize("slow down at least 30 %");
        assert_eq!(texts(&spaced), ["slow", "down", "at", "least", "30%"]);
    }

    #[test]
    fn units_merge_into_number() {
        let toks = tokenize("decrease 10 km/h");
        assert_eq!(texts(&toks), ["decrease", "10 km/h"]);
        assert_eq!(toks[1].pos, Pos::Num);
        let attached = tokenize("decrease 10km/h");
        assert_eq!(texts(&attached), ["decrease", "10 km/h"]);
    }

    #[test]
    fn multiwords_merge() {
        let toks = tokenize("a speed limit sign appears on the roadside.");
        assert_eq!(texts(&toks), ["a", "speed limit sign", "appears", "on", "the", "roadside"]);
        let toks = tokenize("lane lines are removed from the road");
        assert_eq!(toks[0].text, "lane lines");
        assert_eq!(toks[0].lemma, "lane line");
        let toks = tokenize("a car is in front of the bus");
        assert_eq!(toks[3].text, "in front of");
    }

    #[test]
    fn pronoun_clause_length() {
        assert_eq!(tokenize("he gets closer to the vehicle").len(), 6);
    }

    #[test]
    fn lemma_table() {
        let cases = [
            ("appears", "appear"),
            ("removed", "remove"),
            ("replaced", "replace"),
            ("changes", "change"),
            ("buildings", "building"),
            ("trees", "tree"),
            ("lines", "line"),
            ("stopped", "stop"),
            ("getting", "get"),
            ("driving", "driving"),
            ("gets", "get"),
            ("are", "be"),
            ("crosses", "cross"),
            ("pedestrians", "pedestrian"),
            ("speed", "speed"),
            ("decreased", "decrease"),
            ("cities", "city"),
            ("slowed", "slow"),
            ("people", "person"),
        ];
        for (word, lemma) in cases {
            assert_eq!(lemmatize(word), lemma, "{word}");
        }
    }

    #[test]
    fn punctuation_is_stripped() {
        let toks = tokenize("the ego-vehicle should slow down.~");
        assert_eq!(texts(&toks), ["the", "ego-vehicle", "should", "slow", "down"]);
    }
}
