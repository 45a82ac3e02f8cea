//! Slow reference implementations and random instance generators.

use std::collections::{BTreeSet, HashMap};

use propnames::kb::{KnowledgeBase, Record};
use propnames::matcher::match_known;
use propnames::overlay::DocumentKb;
use propnames::text::fold_letters;
use propnames::tokenizer::tokenize;
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// acronyms

fn initial(word: &str) -> Option<char> {
    let c = word.chars().find(|c| c.is_alphanumeric())?;
    fold_letters(&c.to_string()).chars().next()
}

/// Tries every subset of skipped words.
pub fn acronym_oracle(acronym: &str, words: &[String], skippable: &[bool]) -> bool {
    let letters: Vec<char> = fold_letters(acronym)
        .chars()
        .filter(|c| c.is_alphabetic())
        .collect();
    if letters.len() < 2 || words.is_empty() {
        return false;
    }
    let optional: Vec<usize> = (0..words.len()).filter(|&i| skippable[i]).collect();
    'mask: for mask in 0u32..(1 << optional.len()) {
        let mut spelled = Vec::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if let Ok(bit) = optional.binary_search(&i) {
                if mask & (1 << bit) != 0 {
                    continue;
                }
            }
            match initial(w) {
                Some(c) => spelled.push(c),
                None => continue 'mask,
            }
        }
        if spelled == letters {
            return true;
        }
    }
    false
}

/// Words the sample KB marks as skippable, plus punctuation.
pub const SKIPPABLE: &[&str] = &[
    "de", "des", "du", "d'", "la", "le", "les", "l'", "et", "en", "sur", "pour", "the", "of",
    "and", ",",
];
pub const CONTENT: &[&str] = &[
    "Banque",
    "Centre",
    "recherche",
    "études",
    "Études",
    "Économie",
    "économie",
    "Société",
    "Bourses",
    "Françaises",
    "France",
    "Agence",
    "Internationale",
    "Energie",
    "Énergie",
    "Atomique",
    "documentation",
    "santé",
    "Institute",
    "Primary",
    "Aluminium",
    "International",
    "National",
    "Office",
    "Union",
    "Crédit",
    "Régional",
    "Zone",
    "Quartier",
    "Yacht",
    "Xénon",
    "Wagons",
    "Véhicules",
    "Hôtel",
    "Îles",
    "Ordre",
    "Gaz",
];

#[derive(Debug, Clone)]
pub struct AcronymInstance {
    pub acronym: String,
    pub words: Vec<String>,
    pub skippable: Vec<bool>,
}

pub fn random_acronym_instance<R: Rng>(rng: &mut R) -> AcronymInstance {
    let k = rng.gen_range(0..=12);
    let content = rng.gen_range(1..=6);
    let mut items: Vec<(String, bool)> = Vec::new();
    for _ in 0..content {
        items.push((CONTENT.choose(rng).unwrap().to_string(), false));
    }
    for _ in 0..k {
        items.push((SKIPPABLE.choose(rng).unwrap().to_string(), true));
    }
    items.shuffle(rng);
    // keep a content word first most of the time, like real expansions
    if rng.gen_bool(0.8) {
        if let Some(p) = items.iter().position(|i| !i.1) {
            items.swap(0, p);
        }
    }
    let mut letters: Vec<char> = items
        .iter()
        .filter(|(_, skip)| !*skip || rng.gen_bool(0.3))
        .filter_map(|(w, _)| initial(w))
        .collect();
    match rng.gen_range(0..10) {
        0 | 1 => {
            let i = rng.gen_range(0..letters.len());
            letters[i] = (b'a' + rng.gen_range(0..26u8)) as char;
        }
        2 => {
            letters.pop();
        }
        3 => letters.push((b'a' + rng.gen_range(0..26u8)) as char),
        4 => letters.reverse(),
        _ => {}
    }
    let mut acronym: String = letters.iter().collect::<String>().to_uppercase();
    if rng.gen_bool(0.1) {
        acronym = acronym.to_lowercase();
    }
    let (words, skippable) = items.into_iter().unzip();
    AcronymInstance {
        acronym,
        words,
        skippable,
    }
}

// ---------------------------------------------------------------------------
// known-form matching

/// A small random KB together with the facts the oracle needs.
pub struct RandomKb {
    pub kb: KnowledgeBase,
    /// Lowercase spelling of each word.
    pub vocab: Vec<String>,
    /// Class representative (a word index) per word.
    pub rep: Vec<usize>,
    /// (word indices, reference index)
    pub forms: Vec<(Vec<usize>, usize)>,
}

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "tu", "re", "sa", "no", "vi", "po", "de", "ga", "bu",
];

pub fn random_kb<R: Rng>(rng: &mut R) -> RandomKb {
    let n_words = rng.gen_range(3..=14);
    let mut vocab: Vec<String> = Vec::new();
    while vocab.len() < n_words {
        let w: String = (0..rng.gen_range(1..=2))
            .map(|_| *SYLLABLES.choose(rng).unwrap())
            .collect();
        if !vocab.contains(&w) {
            vocab.push(w);
        }
    }
    let surfaces: Vec<String> = vocab
        .iter()
        .map(|w| {
            if rng.gen_bool(0.5) {
                capitalize(w)
            } else {
                w.clone()
            }
        })
        .collect();

    let mut rep: Vec<usize> = (0..n_words).collect();
    let mut records = vec![Record::Header {
        format_version: 1,
        categories: vec!["thing".into()],
    }];
    for (i, s) in surfaces.iter().enumerate() {
        records.push(Record::Word {
            id: format!("w{i}"),
            surface: s.clone(),
            attributes: Vec::new(),
        });
    }
    let mut free: Vec<usize> = (0..n_words).collect();
    free.shuffle(rng);
    let mut class = 0;
    while free.len() >= 2 && rng.gen_bool(0.5) {
        let size = rng.gen_range(2..=free.len().min(3));
        let members: Vec<usize> = free.drain(..size).collect();
        for &m in &members {
            rep[m] = members[0];
        }
        records.push(Record::Equiv {
            id: format!("e{class}"),
            members: members.iter().map(|m| format!("w{m}")).collect(),
        });
        class += 1;
    }

    let n_forms = rng.gen_range(1..=50);
    let mut forms = Vec::new();
    let mut n_refs = 0;
    let mut canonical: Vec<usize> = Vec::new();
    for f in 0..n_forms {
        let len = rng.gen_range(1..=4);
        let words: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n_words)).collect();
        let r = if n_refs == 0 || rng.gen_bool(0.6) {
            n_refs += 1;
            canonical.push(f);
            n_refs - 1
        } else {
            rng.gen_range(0..n_refs)
        };
        records.push(Record::Form {
            id: format!("f{f}"),
            words: words.iter().map(|w| format!("w{w}")).collect(),
            reference: format!("r{r}"),
        });
        forms.push((words, r));
    }
    for (r, &f) in canonical.iter().enumerate() {
        records.push(Record::Reference {
            id: format!("r{r}"),
            canonical_form: format!("f{f}"),
            category: "thing".into(),
            attributes: Vec::new(),
            located_in: Vec::new(),
            frequency_rank: r as u32,
        });
    }
    let kb = KnowledgeBase::from_records_lenient(records.into_iter().map(|r| (0, r)).collect())
        .expect("random KB builds");
    RandomKb {
        kb,
        vocab,
        rep,
        forms,
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn random_text<R: Rng>(rng: &mut R, kb: &RandomKb) -> String {
    let n = rng.gen_range(0..=200);
    let mut out: Vec<String> = Vec::with_capacity(n);
    for _ in 0..n {
        let roll = rng.gen_range(0..20);
        out.push(match roll {
            0 | 1 => "-".into(),
            2 => ",".into(),
            3 => "zz".into(),
            _ => {
                let w = kb.vocab.choose(rng).unwrap();
                if rng.gen_bool(0.5) {
                    capitalize(w)
                } else {
                    w.clone()
                }
            }
        });
    }
    out.join(" ")
}

pub type Span = (usize, usize, BTreeSet<String>);

/// Tries every end position from every start, keeping the longest valid
/// match that contains a capitalised word.
pub fn brute_force_matches(text: &str, kb: &RandomKb) -> Vec<Span> {
    let tokens: Vec<&str> = text.split(' ').filter(|s| !s.is_empty()).collect();
    let index: HashMap<&str, usize> = kb
        .vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();
    let word = |t: &str| index.get(t.to_lowercase().as_str()).copied();
    let keys: Vec<(Vec<usize>, usize)> = kb
        .forms
        .iter()
        .map(|(ws, r)| (ws.iter().map(|&w| kb.rep[w]).collect(), *r))
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if word(tokens[i]).is_none() {
            i += 1;
            continue;
        }
        let mut best: Option<(usize, BTreeSet<String>)> = None;
        let mut key = Vec::new();
        let mut capital = false;
        let mut prev_hyphen = false;
        for (j, t) in tokens.iter().enumerate().skip(i) {
            if *t == "-" {
                if prev_hyphen {
                    break;
                }
                prev_hyphen = true;
                continue;
            }
            let Some(w) = word(t) else { break };
            prev_hyphen = false;
            key.push(kb.rep[w]);
            capital |= t.starts_with(|c: char| c.is_uppercase());
            let refs: BTreeSet<String> = keys
                .iter()
                .filter(|(k, _)| *k == key)
                .map(|(_, r)| format!("r{r}"))
                .collect();
            if capital && !refs.is_empty() {
                best = Some((j + 1, refs));
            }
        }
        match best {
            Some((end, refs)) => {
                out.push((i, end, refs));
                i = end;
            }
            None => i += 1,
        }
    }
    out
}

pub fn library_matches(text: &str, kb: &RandomKb) -> Vec<Span> {
    let doc = tokenize("t", text);
    let dkb = DocumentKb::new(&kb.kb);
    match_known(&doc, &dkb)
        .into_iter()
        .map(|m| {
            let refs = m
                .candidates
                .iter()
                .map(|&r| dkb.reference_label(r).to_string())
                .collect();
            (m.start, m.end, refs)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// drivers shared by the oracle tests and the acceptance run

use propnames::coref::{detect_acronym_defs, match_acronym_letters};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Compares the library with the subset oracle on `count` random
/// instances. Returns the number of instances that matched.
pub fn check_acronyms(kb: &KnowledgeBase, seed: u64, count: usize) -> Result<usize, String> {
    let dkb = DocumentKb::new(kb);
    let mut r = rng(seed);
    let mut positive = 0;
    for n in 0..count {
        let inst = random_acronym_instance(&mut r);
        let words: Vec<&str> = inst.words.iter().map(String::as_str).collect();
        let want = acronym_oracle(&inst.acronym, &inst.words, &inst.skippable);
        let got = match_acronym_letters(&inst.acronym, &words, &dkb);
        if want != got {
            return Err(format!(
                "instance {n}: {inst:?} oracle={want} library={got}"
            ));
        }
        positive += want as usize;
    }
    Ok(positive)
}

/// Parenthesised material that must not be read as an acronym definition.
pub const REJECTIONS: &[&str] = &[
    "Le Crédit Lyonnais (CX) recule.",
    "International Primary Aluminium Institute (IPIA) a publié.",
    "La Société Générale (SGX) progresse.",
    "Agence France Presse (AF) rapporte.",
    "Union des Banques (UDBX) annonce.",
    "Il a vu le président (Jean Dupont) hier.",
    "Renault (voir page 3) recule.",
    "Il a quitté Lyon (RHÔNE) hier.",
    "Air Liquide (A.L.X.) monte.",
    "Gaz de France (GFD) baisse.",
    "ONU (Organisation Mondiale de la Santé) a parlé.",
    "Électricité de France (EDX) investit.",
    "Le CNRS (centre de recherche) recrute.",
    "Peugeot (PSA) augmente.",
    "Banque Nationale de Paris (BPN) recule.",
    "France Télécom (1993) a changé.",
    "Nestlé () cède.",
    "The Institute (I) opened.",
    "Compagnie Générale (CGE a fusionné.",
    "Total (TOTAL) monte.",
];

/// Texts from `texts` in which an acronym definition was detected.
pub fn accepted_definitions(kb: &KnowledgeBase, texts: &[&str]) -> Vec<String> {
    texts
        .iter()
        .filter(|text| {
            let doc = tokenize("t", text);
            let mut dkb = DocumentKb::new(kb);
            let known = match_known(&doc, &dkb);
            !detect_acronym_defs(&doc, &mut dkb, &known).is_empty()
        })
        .map(|t| t.to_string())
        .collect()
}

/// Compares the matcher with the brute-force oracle on `kbs` random KBs,
/// five texts each.
pub fn check_matcher(seed: u64, kbs: usize) -> Result<(), String> {
    let mut r = rng(seed);
    for n in 0..kbs {
        let kb = random_kb(&mut r);
        for t in 0..5 {
            let text = random_text(&mut r, &kb);
            let want = brute_force_matches(&text, &kb);
            let got = library_matches(&text, &kb);
            if want != got {
                return Err(format!(
                    "kb {n} text {t}: {text:?}\noracle  {want:?}\nlibrary {got:?}"
                ));
            }
        }
    }
    Ok(())
}
