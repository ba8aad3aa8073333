//! Lexicon-driven part-of-speech tagging.

use std::collections::HashSet;

use super::token::{Pos, Token};

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "each", "every", "some", "any", "all",
    "no", "another", "its", "his", "her", "their",
];
const PRONOUNS: &[&str] = &["he", "she", "it", "they", "him", "them", "we", "you", "i"];
const ADPOSITIONS: &[&str] = &[
    "on", "in", "at", "to", "into", "onto", "with", "from", "of", "by", "behind", "near",
    "under", "over", "across", "along", "beside", "towards", "toward", "than", "for", "in front of",
    "down", "up", "through", "around",
];
const AUXILIARIES: &[&str] = &[
    "should", "must", "will", "would", "can", "could", "shall", "may", "might", "is", "are",
    "was", "were", "be", "been", "being", "am", "do", "does", "did", "has", "have", "had",
];
const NEGATIONS: &[&str] = &["not", "n't", "never", "cannot"];
const PARTICLES: &[&str] = &["down", "up"];
const COMPARATIVES: &[&str] = &[
    "closer", "nearer", "farther", "further", "more", "less", "faster", "slower", "bigger",
    "larger", "smaller", "higher", "lower",
];
const ADVERBS: &[&str] = &[
    "least", "most", "very", "also", "then", "still", "again", "quickly", "slowly", "suddenly",
    "immediately", "much", "significantly", "slightly", "only", "just", "too",
];
const ADJECTIVES: &[&str] = &[
    "black", "white", "red", "green", "blue", "yellow", "gray", "grey", "orange", "silver",
    "brown", "purple", "pink", "dark", "bright", "dashed", "solid", "broken", "continuous",
    "same", "different", "heavy", "light", "normal", "rainy", "cloudy", "snowy", "sunny",
    "foggy", "small", "large", "big", "little", "tall", "short", "new", "old", "left", "right",
    "forward", "reverse", "vertical", "horizontal", "circular", "square", "round", "slow",
    "fast", "unchanged", "wet", "dry", "empty", "busy", "steady",
];

/// Closed-class word lists plus open-class priors used by [`pos_tag`].
#[derive(Debug, Clone)]
pub struct PosLexicon {
    determiners: HashSet<String>,
    pronouns: HashSet<String>,
    adpositions: HashSet<String>,
    auxiliaries: HashSet<String>,
    negations: HashSet<String>,
    comparatives: HashSet<String>,
    adverbs: HashSet<String>,
    adjectives: HashSet<String>,
    nouns: HashSet<String>,
    verbs: HashSet<String>,
}

fn set(words: &[&str]) -> HashSet<String> {
    words.iter().map(|w| w.to_string()).collect()
}

impl Default for PosLexicon {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PosLexicon {
    /// Closed classes only; open-class priors come from the ontology.
    pub fn builtin() -> Self {
        Self {
            determiners: set(DETERMINERS),
            pronouns: set(PRONOUNS),
            adpositions: set(ADPOSITIONS),
            auxiliaries: set(AUXILIARIES),
            negations: set(NEGATIONS),
            comparatives: set(COMPARATIVES),
            adverbs: set(ADVERBS),
            adjectives: set(ADJECTIVES),
            nouns: HashSet::new(),
            verbs: set(&[
                "get", "move", "drive", "cross", "walk", "stand", "go", "approach", "steer",
                "deviate", "come", "run", "pass", "slow",
            ]),
        }
    }

    pub fn add_nouns<I, S>(&mut self, nouns: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for n in nouns {
            let n = n.as_ref().to_lowercase();
            // Multiword nouns also prime their head word.
            if let Some(head) = n.rsplit(' ').next() {
                self.nouns.insert(head.to_string());
            }
            self.nouns.insert(n);
        }
    }

    pub fn add_verbs<I, S>(&mut self, verbs: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.verbs
            .extend(verbs.into_iter().map(|v| v.as_ref().to_lowercase()));
    }

    pub fn add_adjectives<I, S>(&mut self, adjectives: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.adjectives
            .extend(adjectives.into_iter().map(|v| v.as_ref().to_lowercase()));
    }

    pub fn is_negation(&self, word: &str) -> bool {
        self.negations.contains(&word.to_lowercase()) || word.eq_ignore_ascii_case("no")
    }

    pub fn is_adjective(&self, word: &str) -> bool {
        self.adjectives.contains(&word.to_lowercase())
    }

    pub fn is_comparative(&self, word: &str) -> bool {
        self.comparatives.contains(&word.to_lowercase())
    }
}

fn suffix_guess(word: &str, prev: Option<Pos>) -> Option<Pos> {
    if word.ends_with("ly") {
        Some(Pos::Adv)
    } else if word.ends_with("ed") && prev == Some(Pos::Aux) {
        Some(Pos::Verb)
    } else if ["ous", "ful", "ive", "able", "ible", "ish"]
        .iter()
        .any(|s| word.ends_with(s))
    {
        Some(Pos::Adj)
    } else {
        None
    }
}

/// Assign a part of speech to every token. Unknown words default to NOUN.
pub fn pos_tag(tokens: &[Token], lexicon: &PosLexicon) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    for (i, tok) in tokens.iter().enumerate() {
        let mut tok = tok.clone();
        tok.comparative = false;
        let word = tok.text.to_lowercase();
        let prev = out.last().map(|t| t.pos);
        let next_word = tokens.get(i + 1).map(|t| t.text.to_lowercase());
        let next_is_particle = next_word
            .as_deref()
            .is_some_and(|w| PARTICLES.contains(&w));

        tok.pos = if tok.is_quantity() {
            tok.pos
        } else if word.contains(' ') {
            if lexicon.adpositions.contains(&word) {
                Pos::Adp
            } else {
                Pos::Noun
            }
        } else if lexicon.determiners.contains(&word) {
            Pos::Det
        } else if lexicon.pronouns.contains(&word) {
            Pos::Pron
        } else if lexicon.auxiliaries.contains(&word) {
            Pos::Aux
        } else if lexicon.negations.contains(&word)
            || (PARTICLES.contains(&word.as_str()) && prev == Some(Pos::Verb))
        {
            Pos::Part
        } else if lexicon.adpositions.contains(&word) {
            Pos::Adp
        } else if lexicon.comparatives.contains(&word) {
            tok.comparative = true;
            Pos::Adv
        } else if lexicon.adverbs.contains(&word) {
            Pos::Adv
        } else {
            open_class(&word, &tok.lemma, prev, next_is_particle, lexicon)
        };
        out.push(tok);
    }
    out
}

fn open_class(
    word: &str,
    lemma: &str,
    prev: Option<Pos>,
    next_is_particle: bool,
    lexicon: &PosLexicon,
) -> Pos {
    let noun = lexicon.nouns.contains(lemma) || lexicon.nouns.contains(word);
    let verb = lexicon.verbs.contains(lemma);
    let adj = lexicon.adjectives.contains(word);
    let after_verbal = matches!(prev, Some(Pos::Aux | Pos::Pron | Pos::Part));
    let after_nominal_marker = matches!(prev, Some(Pos::Det | Pos::Adj | Pos::Adp));

    if verb && (after_verbal || next_is_particle) {
        Pos::Verb
    } else if noun && after_nominal_marker {
        Pos::Noun
    } else if adj && (after_nominal_marker || (!noun && !verb)) {
        Pos::Adj
    } else if verb && prev == Some(Pos::Noun) {
        Pos::Verb
    } else if noun {
        Pos::Noun
    } else if verb {
        Pos::Verb
    } else if adj {
        Pos::Adj
    } else {
        suffix_guess(word, prev).unwrap_or(Pos::Noun)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule_lang::token::tokenize;

    fn lexicon() -> PosLexicon {
        let mut lex = PosLexicon::builtin();
        lex.add_nouns(["pedestrian", "roadside", "car", "speed", "line", "lane line"]);
        lex.add_verbs(["appear", "slow", "speed", "remove", "decrease", "keep"]);
        lex
    }

    fn tags(text: &str) -> Vec<Pos> {
        pos_tag(&tokenize(text), &lexicon())
            .into_iter()
            .map(|t| t.pos)
            .collect()
    }

    #[test]
    fn dependency_figure_tags() {
        assert_eq!(
            tags("a pedestrian appears on the roadside"),
            [Pos::Det, Pos::Noun, Pos::Verb, Pos::Adp, Pos::Det, Pos::Noun]
        );
    }

    #[test]
    fn adjective_before_noun() {
        assert_eq!(tags("a black car"), [Pos::Det, Pos::Adj, Pos::Noun]);
    }

    #[test]
    fn comparative_flag() {
        let toks = pos_tag(&tokenize("he gets closer to the vehicle"), &lexicon());
        assert_eq!(toks[0].pos, Pos::Pron);
        assert_eq!(toks[2].pos, Pos::Adv);
        assert!(toks[2].comparative);
    }

    #[test]
    fn modal_is_aux_and_phrasal_particle() {
        assert_eq!(
            tags("the ego-vehicle should slow down"),
            [Pos::Det, Pos::Noun, Pos::Aux, Pos::Verb, Pos::Part]
        );
        assert_eq!(
            tags("slow down at least 30%"),
            [Pos::Verb, Pos::Part, Pos::Adp, Pos::Adv, Pos::Percent]
        );
    }

    #[test]
    fn noun_verb_ambiguity_uses_context() {
        assert_eq!(
            tags("the speed should decrease more"),
            [Pos::Det, Pos::Noun, Pos::Aux, Pos::Verb, Pos::Adv]
        );
    }

    #[test]
    fn unknown_defaults_to_noun() {
        assert_eq!(tags("the flibbertigibbet"), [Pos::Det, Pos::Noun]);
    }
}
