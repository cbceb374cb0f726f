//! Turns machine intent labels into short natural sentences.
//!
//! A label such as `book_hotel` is split into tokens, tagged with a small
//! rule-based tagger and classified as a verb phrase (`VERB NOUN+`) or a
//! noun phrase (`NOUN+`). The sentence is then
//! `prefix + verb + article + nouns`, with `get` standing in for the verb of
//! a noun phrase:
//!
//! ```
//! use gzsi::lexicalize::{lexicalize, TemplateSet, LexicalizeOptions};
//! let templates = TemplateSet::builtin();
//! let d1 = templates.get("d1").unwrap();
//! let s = lexicalize("book_hotel", d1, &LexicalizeOptions::default()).unwrap();
//! assert_eq!(s, "the user wants to book a hotel");
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Intent;
use crate::error::{Error, Result};
use crate::jsonl;

const VERBS: &[&str] = &[
    "accept",
    "activate",
    "add",
    "apply",
    "ask",
    "book",
    "browse",
    "buy",
    "calculate",
    "call",
    "cancel",
    "change",
    "check",
    "claim",
    "clear",
    "close",
    "compare",
    "confirm",
    "convert",
    "create",
    "decrease",
    "define",
    "delete",
    "deposit",
    "disable",
    "download",
    "edit",
    "enable",
    "explain",
    "find",
    "fix",
    "flip",
    "freeze",
    "get",
    "give",
    "go",
    "hire",
    "increase",
    "list",
    "lock",
    "look",
    "lookup",
    "make",
    "modify",
    "move",
    "mute",
    "open",
    "order",
    "pause",
    "pay",
    "pick",
    "plan",
    "play",
    "post",
    "read",
    "recommend",
    "redeem",
    "refund",
    "reject",
    "remind",
    "remove",
    "renew",
    "rent",
    "repeat",
    "replace",
    "report",
    "request",
    "reserve",
    "reset",
    "restore",
    "resume",
    "return",
    "review",
    "roll",
    "save",
    "schedule",
    "search",
    "send",
    "set",
    "share",
    "show",
    "skip",
    "spell",
    "start",
    "stop",
    "suggest",
    "sync",
    "take",
    "tell",
    "track",
    "transfer",
    "translate",
    "turn",
    "unlock",
    "update",
    "upload",
    "view",
    "withdraw",
    "write",
];

const FUNCTION_WORDS: &[&str] = &[
    "a", "about", "an", "and", "at", "by", "for", "from", "in", "into", "me", "my", "near", "of", "on", "or", "per",
    "the", "to", "with",
];

/// Part-of-speech classes the lexicalizer distinguishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tag {
    Verb,
    Noun,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phrase {
    VerbPhrase,
    NounPhrase,
}

/// Splits a label on `_`, `-`, spaces, other punctuation and camel-case
/// boundaries, lowercasing every token.
pub fn tokenize_label(label: &str) -> Result<Vec<String>> {
    let chars: Vec<char> = label.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            continue;
        }
        if c.is_uppercase() && !current.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            // fooBar, or the last capital of an acronym followed by a word: HTTPServer
            if prev.is_lowercase() || prev.is_numeric() || (prev.is_uppercase() && next_lower) {
                tokens.push(std::mem::take(&mut current));
            }
        }
        current.extend(c.to_lowercase());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if tokens.is_empty() {
        return Err(Error::EmptyLabel(label.to_string()));
    }
    Ok(tokens)
}

pub fn is_known_verb(token: &str) -> bool {
    VERBS.binary_search(&token).is_ok()
}

/// Tags each token. Only the leading token, or a token following `to` or
/// `and`, can be a verb; unknown tokens are nouns.
pub fn pos_tag<S: AsRef<str>>(tokens: &[S]) -> Vec<Tag> {
    let mut tags = Vec::with_capacity(tokens.len());
    for (i, token) in tokens.iter().enumerate() {
        let token = token.as_ref();
        let tag = if FUNCTION_WORDS.contains(&token) {
            Tag::Other
        } else if i == 0 {
            let suffix_verb = token.len() > 4 && (token.ends_with("ing") || token.ends_with("ify"));
            if is_known_verb(token) || suffix_verb {
                Tag::Verb
            } else {
                Tag::Noun
            }
        } else if matches!(tokens[i - 1].as_ref(), "to" | "and") && is_known_verb(token) {
            Tag::Verb
        } else {
            Tag::Noun
        };
        tags.push(tag);
    }
    tags
}

pub fn classify_phrase(tags: &[Tag]) -> Phrase {
    match tags.first() {
        Some(Tag::Verb) => Phrase::VerbPhrase,
        _ => Phrase::NounPhrase,
    }
}

/// Plural nouns end in `s` but not in `ss`, `us` or `is`.
pub fn is_plural(noun: &str) -> bool {
    noun.ends_with('s') && !(noun.ends_with("ss") || noun.ends_with("us") || noun.ends_with("is"))
}

/// Indefinite article for a noun run; empty when the head (last) noun is plural.
pub fn choose_article<S: AsRef<str>>(nouns: &[S]) -> &'static str {
    let (Some(first), Some(head)) = (nouns.first(), nouns.last()) else {
        return "";
    };
    if is_plural(head.as_ref()) {
        ""
    } else if first.as_ref().starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    Declarative,
    Question,
    Imperative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub kind: TemplateKind,
    pub prefix: String,
}

impl Template {
    pub fn new(id: &str, kind: TemplateKind, prefix: &str) -> Self {
        Template {
            id: id.to_string(),
            kind,
            prefix: prefix.to_string(),
        }
    }
}

/// An ordered collection of templates with unique ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateSet {
    templates: Vec<Template>,
}

impl TemplateSet {
    pub fn new(templates: Vec<Template>) -> Result<Self> {
        for (i, t) in templates.iter().enumerate() {
            if t.prefix.split_whitespace().next().is_none() {
                return Err(Error::InvalidArgument(format!(
                    "template `{}` has an empty prefix",
                    t.id
                )));
            }
            if templates[..i].iter().any(|o| o.id == t.id) {
                return Err(Error::InvalidArgument(format!("duplicate template id `{}`", t.id)));
            }
        }
        Ok(TemplateSet { templates })
    }

    /// `d1`, `d2`, `q1`, `q2` and the imperative `tell`.
    pub fn builtin() -> Self {
        use TemplateKind::*;
        TemplateSet {
            templates: vec![
                Template::new("d1", Declarative, "the user wants to"),
                Template::new("d2", Declarative, "the user would like to"),
                Template::new("q1", Question, "does the user want to"),
                Template::new("q2", Question, "can the user"),
                Template::new("tell", Imperative, "tell the user how to"),
            ],
        }
    }

    /// Reads a JSONL template file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        TemplateSet::new(jsonl::read(path)?)
    }

    pub fn get(&self, id: &str) -> Result<&Template> {
        self.templates
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::UnknownTemplate(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Template> {
        self.templates.iter()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.templates.iter().map(|t| t.id.as_str()).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LexicalizeOptions {
    /// Capitalize the first letter of the sentence.
    pub capitalize: bool,
    /// Append `?` to sentences built from question templates.
    pub question_mark: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexicalizedIntent {
    pub intent_id: String,
    pub template_id: String,
    pub sentence: String,
}

/// Lexicalizes a raw label with one template.
pub fn lexicalize(label: &str, template: &Template, options: &LexicalizeOptions) -> Result<String> {
    let tokens = tokenize_label(label)?;
    let tags = pos_tag(&tokens);
    let (verb, rest, rest_tags) = match classify_phrase(&tags) {
        Phrase::VerbPhrase => (tokens[0].as_str(), &tokens[1..], &tags[1..]),
        Phrase::NounPhrase => ("get", &tokens[..], &tags[..]),
    };
    let noun_run = rest_tags.iter().take_while(|t| **t == Tag::Noun).count();
    let article = choose_article(&rest[..noun_run]);

    let mut words: Vec<&str> = template.prefix.split_whitespace().collect();
    words.push(verb);
    if !article.is_empty() {
        words.push(article);
    }
    words.extend(rest.iter().map(String::as_str));
    let mut sentence = words.join(" ").to_lowercase();
    if options.question_mark && template.kind == TemplateKind::Question {
        sentence.push('?');
    }
    if options.capitalize {
        let mut chars = sentence.chars();
        if let Some(first) = chars.next() {
            sentence = first.to_uppercase().chain(chars).collect();
        }
    }
    Ok(sentence)
}

pub fn apply_template(intent: &Intent, template: &Template, options: &LexicalizeOptions) -> Result<LexicalizedIntent> {
    Ok(LexicalizedIntent {
        intent_id: intent.id.clone(),
        template_id: template.id.clone(),
        sentence: lexicalize(&intent.label, template, options)?,
    })
}
