//! Deterministic synthetic intent corpora.
//!
//! Utterances are assembled from per-intent verbs, objects and details
//! dropped into generic request frames. The first verb and object of each
//! intent are the words of its label, so most utterances share vocabulary
//! with the label while the rest use synonyms.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::corpus::{Dataset, Intent, Utterance};
use crate::error::{Error, Result};
use crate::rng;

struct IntentSpec {
    label: &'static str,
    verbs: &'static [&'static str],
    objects: &'static [&'static str],
    details: &'static [&'static str],
}

const SPECS: [IntentSpec; 20] = [
    IntentSpec {
        label: "book_hotel",
        verbs: &["book", "reserve", "get"],
        objects: &["hotel", "hotel room", "room", "place to stay"],
        details: &["in paris", "for two nights", "near the beach", "for this weekend"],
    },
    IntentSpec {
        label: "play_music",
        verbs: &["play", "put on", "start"],
        objects: &["music", "some songs", "playlist", "tunes"],
        details: &[
            "by the beatles",
            "from the eighties",
            "in the kitchen",
            "that is relaxing",
        ],
    },
    IntentSpec {
        label: "set_alarm",
        verbs: &["set", "create", "schedule"],
        objects: &["alarm", "wake up alarm", "alarm clock"],
        details: &["for 7 am", "for tomorrow morning", "at six thirty", "every weekday"],
    },
    IntentSpec {
        label: "check_balance",
        verbs: &["check", "see", "look at"],
        objects: &["balance", "account balance", "money left"],
        details: &["in my checking account", "on my savings", "right now", "today"],
    },
    IntentSpec {
        label: "order_pizza",
        verbs: &["order", "get", "buy"],
        objects: &["pizza", "large pizza", "pepperoni pizza", "slice"],
        details: &[
            "for delivery",
            "with extra cheese",
            "for dinner",
            "from the place downtown",
        ],
    },
    IntentSpec {
        label: "find_restaurant",
        verbs: &["find", "search for", "recommend"],
        objects: &["restaurant", "place to eat", "good diner", "restaurant nearby"],
        details: &[
            "with italian food",
            "that is open now",
            "for lunch",
            "in the city center",
        ],
    },
    IntentSpec {
        label: "get_weather",
        verbs: &["get", "check", "hear"],
        objects: &["weather", "forecast", "weather report", "temperature"],
        details: &["for tomorrow", "in london", "this weekend", "outside"],
    },
    IntentSpec {
        label: "cancel_reservation",
        verbs: &["cancel", "call off", "drop"],
        objects: &["reservation", "booking", "table reservation"],
        details: &["for tonight", "at the steakhouse", "i made yesterday", "for friday"],
    },
    IntentSpec {
        label: "reset_settings",
        verbs: &["reset", "restore", "wipe"],
        objects: &["settings", "factory settings", "device settings", "preferences"],
        details: &["on my phone", "to default", "on this tablet", "completely"],
    },
    IntentSpec {
        label: "transfer_money",
        verbs: &["transfer", "send", "move"],
        objects: &["money", "funds", "cash", "payment"],
        details: &["to my savings", "to john", "from checking", "to my mom"],
    },
    IntentSpec {
        label: "track_package",
        verbs: &["track", "locate", "trace"],
        objects: &["package", "parcel", "delivery", "shipment"],
        details: &["from amazon", "that was shipped monday", "i ordered", "coming today"],
    },
    IntentSpec {
        label: "call_taxi",
        verbs: &["call", "get", "hail"],
        objects: &["taxi", "cab", "ride", "taxi cab"],
        details: &["to the airport", "to downtown", "right now", "for 5 pm"],
    },
    IntentSpec {
        label: "flight_status",
        verbs: &["check", "get", "know"],
        objects: &["flight status", "status of my flight", "flight", "departure time"],
        details: &["for ua 123", "to boston", "leaving today", "from new york"],
    },
    IntentSpec {
        label: "rent_car",
        verbs: &["rent", "hire", "lease"],
        objects: &["car", "rental car", "vehicle", "suv"],
        details: &["for the week", "at the airport", "in denver", "for tomorrow"],
    },
    IntentSpec {
        label: "pay_bill",
        verbs: &["pay", "settle", "cover"],
        objects: &["bill", "electric bill", "phone bill", "invoice"],
        details: &["due tomorrow", "for this month", "online", "with my card"],
    },
    IntentSpec {
        label: "add_reminder",
        verbs: &["add", "create", "make"],
        objects: &["reminder", "note", "memo"],
        details: &["to buy milk", "for my meeting", "about the dentist", "for tomorrow"],
    },
    IntentSpec {
        label: "translate_phrase",
        verbs: &["translate", "convert", "say"],
        objects: &["phrase", "sentence", "words", "text"],
        details: &["into spanish", "to french", "in german", "into japanese"],
    },
    IntentSpec {
        label: "share_location",
        verbs: &["share", "send", "show"],
        objects: &["location", "address", "position", "whereabouts"],
        details: &["with my wife", "to my friend", "with the team", "on the map"],
    },
    IntentSpec {
        label: "buy_tickets",
        verbs: &["buy", "purchase", "get"],
        objects: &["tickets", "concert tickets", "movie tickets", "seats"],
        details: &["for saturday", "for the game", "for two people", "online"],
    },
    IntentSpec {
        label: "turn_on_lights",
        verbs: &["turn on", "switch on", "light up"],
        objects: &["lights", "lamps", "bedroom lights", "kitchen lights"],
        details: &["in the living room", "upstairs", "in the hallway", "now"],
    },
];

const FRAMES: [&str; 12] = [
    "{v} {d}{o} {x}",
    "i want to {v} {d}{o} {x}",
    "can you {v} {d}{o} {x}",
    "please {v} {d}{o}",
    "i need to {v} {d}{o} {x}",
    "help me {v} {d}{o}",
    "could you {v} {d}{o} for me",
    "how do i {v} {d}{o} {x}",
    "i would like to {v} {d}{o}",
    "{v} {d}{o} {x} please",
    "is it possible to {v} {d}{o} {x}",
    "hey {v} {d}{o} {x}",
];

const DETERMINERS: [&str; 4] = ["the ", "my ", "a ", ""];

/// Shape of a generated corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub n_intents: usize,
    pub per_intent: usize,
    /// Probability of using the label's own verb and object.
    pub label_word_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_intents: 20,
            per_intent: 40,
            label_word_rate: 0.7,
            seed: 2024,
        }
    }
}

struct Lexicon<'a> {
    label: String,
    verbs: &'a [&'a str],
    objects: &'a [&'a str],
    details: &'a [&'a str],
}

fn lexicons(n: usize) -> Vec<Lexicon<'static>> {
    let mut out: Vec<Lexicon> = SPECS
        .iter()
        .map(|s| Lexicon {
            label: s.label.to_string(),
            verbs: s.verbs,
            objects: s.objects,
            details: s.details,
        })
        .collect();
    let mut labels: BTreeSet<String> = out.iter().map(|l| l.label.clone()).collect();
    'outer: for shift in 1..SPECS.len() {
        for (i, v) in SPECS.iter().enumerate() {
            if out.len() >= n {
                break 'outer;
            }
            let o = &SPECS[(i + shift) % SPECS.len()];
            let label = format!("{}_{}", v.verbs[0], o.objects[0]).replace(' ', "_");
            if labels.insert(label.clone()) {
                out.push(Lexicon {
                    label,
                    verbs: v.verbs,
                    objects: o.objects,
                    details: o.details,
                });
            }
        }
    }
    out.truncate(n);
    out
}

/// Largest intent inventory [`generate`] can produce.
pub fn max_intents() -> usize {
    lexicons(usize::MAX).len()
}

fn pick<'a>(rng: &mut rng::Rng, words: &[&'a str], first_rate: f64) -> &'a str {
    if words.len() == 1 || rng.gen_bool(first_rate) {
        words[0]
    } else {
        words[1..].choose(rng).copied().expect("non-empty")
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n_intents < 2 || spec.n_intents > max_intents() {
        return Err(Error::InvalidArgument(format!(
            "n_intents must be in 2..={}, got {}",
            max_intents(),
            spec.n_intents
        )));
    }
    if spec.per_intent == 0 {
        return Err(Error::InvalidArgument("per_intent must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.label_word_rate) {
        return Err(Error::InvalidArgument("label_word_rate must be in [0, 1]".into()));
    }
    let mut intents = Vec::new();
    let mut utterances = Vec::new();
    for lex in lexicons(spec.n_intents) {
        let mut rng = rng::stream(spec.seed, &format!("synthetic.{}", lex.label));
        let mut texts = BTreeSet::new();
        let mut attempts = 0;
        while texts.len() < spec.per_intent && attempts < spec.per_intent * 50 {
            attempts += 1;
            let frame = FRAMES.choose(&mut rng).expect("frames");
            let text = frame
                .replace("{v}", pick(&mut rng, lex.verbs, spec.label_word_rate))
                .replace("{d}", DETERMINERS.choose(&mut rng).expect("determiners"))
                .replace("{o}", pick(&mut rng, lex.objects, spec.label_word_rate))
                .replace("{x}", lex.details.choose(&mut rng).expect("details"));
            let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
            if texts.insert(text.clone()) {
                let id = format!("{}-{:03}", lex.label, texts.len() - 1);
                utterances.push(Utterance::new(id, text, lex.label.clone()));
            }
        }
        intents.push(Intent::new(lex.label.clone(), lex.label));
    }
    Dataset::new(intents, utterances, format!("synthetic:seed={}", spec.seed))
}

/// The default 20-intent corpus.
pub fn bundled() -> Dataset {
    generate(&SyntheticSpec::default()).expect("default spec is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_shape() {
        let ds = bundled();
        assert_eq!(ds.intents().len(), 20);
        assert_eq!(ds.utterances().len(), 800);
        assert!(ds.utterances_by_intent().values().all(|v| v.len() == 40));
    }

    #[test]
    fn deterministic() {
        let a = bundled();
        let b = bundled();
        assert_eq!(a.utterances(), b.utterances());
        let other = generate(&SyntheticSpec {
            seed: 1,
            ..SyntheticSpec::default()
        })
        .unwrap();
        assert_ne!(a.utterances(), other.utterances());
    }

    #[test]
    fn many_intents() {
        let ds = generate(&SyntheticSpec {
            n_intents: 150,
            per_intent: 4,
            ..SyntheticSpec::default()
        })
        .unwrap();
        assert_eq!(ds.intents().len(), 150);
        assert!(max_intents() >= 150);
        assert!(generate(&SyntheticSpec {
            n_intents: max_intents() + 1,
            ..SyntheticSpec::default()
        })
        .is_err());
    }

    #[test]
    fn most_utterances_share_a_label_word() {
        let ds = bundled();
        let shared = ds
            .utterances()
            .iter()
            .filter(|u| {
                let words: BTreeSet<&str> = u.text.split(' ').collect();
                u.intent_id.split('_').any(|w| words.contains(w))
            })
            .count();
        assert!(shared * 10 >= ds.utterances().len() * 7, "{shared}");
    }
}
