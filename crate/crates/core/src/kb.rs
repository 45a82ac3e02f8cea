//! Knowledge base of proper names.
//!
//! The base is a small graph: words (with attributes and optional
//! equivalence classes), forms (ordered word sequences), and references
//! (one real-world entity owning several synonymous forms, with a single
//! category, factorised attributes, and symmetric homonym links).
//!
//! On disk the base is a stream of JSON records, one per line. A `header`
//! record declares the closed category set; every other record kind
//! (`attribute`, `word`, `equiv`, `form`, `reference`, `homonym`) adds one
//! entity. Loading resolves string ids to dense integer ids and builds a
//! trie keyed on equivalence-class representatives.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::KbError;
use crate::text::fold_case;
use crate::trie::FormTrie;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttrId(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategoryId(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeKind {
    Category,
    WordMarker,
    ReferenceProperty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

#[derive(Debug, Clone)]
pub struct Word {
    pub id: String,
    pub surface: String,
    /// Sorted.
    pub attributes: Vec<AttrId>,
    pub equiv_class: Option<u32>,
}

impl Word {
    pub fn has_attribute(&self, attr: AttrId) -> bool {
        self.attributes.binary_search(&attr).is_ok()
    }
}

#[derive(Debug, Clone)]
pub struct EquivClass {
    pub id: String,
    /// The first member is the class representative.
    pub members: Vec<WordId>,
}

#[derive(Debug, Clone)]
pub struct Form {
    pub id: String,
    pub words: Vec<WordId>,
    pub reference: RefId,
}

#[derive(Debug, Clone)]
pub struct Reference {
    pub id: String,
    pub canonical_form: FormId,
    pub forms: Vec<FormId>,
    /// Always set for base references; overlay references may be
    /// uncategorised until a later pass decides.
    pub category: Option<CategoryId>,
    pub attributes: Vec<AttrId>,
    /// References this one is geographically contained in.
    pub located_in: Vec<RefId>,
    /// 0 is the most frequent reading.
    pub frequency_rank: u32,
    pub homonyms: BTreeSet<RefId>,
}

/// One line of the KB file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Record {
    Header {
        format_version: u32,
        categories: Vec<String>,
    },
    Attribute {
        name: String,
        attribute_kind: AttributeKind,
    },
    Word {
        id: String,
        surface: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        attributes: Vec<String>,
    },
    Equiv {
        id: String,
        members: Vec<String>,
    },
    Form {
        id: String,
        words: Vec<String>,
        reference: String,
    },
    Reference {
        id: String,
        canonical_form: String,
        category: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        attributes: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        located_in: Vec<String>,
        #[serde(default)]
        frequency_rank: u32,
    },
    Homonym {
        pair: [String; 2],
    },
}

const RECORD_KINDS: &[&str] = &[
    "header",
    "attribute",
    "word",
    "equiv",
    "form",
    "reference",
    "homonym",
];

impl Record {
    fn kind(&self) -> &'static str {
        match self {
            Record::Header { .. } => "header",
            Record::Attribute { .. } => "attribute",
            Record::Word { .. } => "word",
            Record::Equiv { .. } => "equiv",
            Record::Form { .. } => "form",
            Record::Reference { .. } => "reference",
            Record::Homonym { .. } => "homonym",
        }
    }

    /// Key used when later KB files override earlier ones.
    fn merge_key(&self) -> (&'static str, String) {
        let id = match self {
            Record::Header { .. } => String::new(),
            Record::Attribute { name, .. } => name.clone(),
            Record::Word { id, .. }
            | Record::Equiv { id, .. }
            | Record::Form { id, .. }
            | Record::Reference { id, .. } => id.clone(),
            Record::Homonym { pair } => {
                let (a, b) = if pair[0] <= pair[1] {
                    (&pair[0], &pair[1])
                } else {
                    (&pair[1], &pair[0])
                };
                format!("{a}\u{0}{b}")
            }
        };
        (self.kind(), id)
    }
}

/// Parses a KB record stream. Blank lines and lines starting with `#` are
/// ignored.
pub fn parse_records(reader: impl BufRead) -> Result<Vec<(usize, Record)>, KbError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| KbError::Io {
            line: lineno,
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(trimmed).map_err(|e| KbError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| KbError::Parse {
                line: lineno,
                message: "record has no string `kind` field".into(),
            })?;
        if !RECORD_KINDS.contains(&kind) {
            return Err(KbError::UnknownRecordKind {
                line: lineno,
                kind: kind.to_string(),
            });
        }
        let record: Record = serde_json::from_value(value).map_err(|e| KbError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        out.push((lineno, record));
    }
    Ok(out)
}

/// Merges several record streams; a record in a later stream replaces the
/// record with the same kind and id from an earlier one. Header category
/// lists are unioned in order of first appearance.
pub fn merge_record_streams(streams: Vec<Vec<(usize, Record)>>) -> Vec<(usize, Record)> {
    let mut categories: Vec<String> = Vec::new();
    let mut version = FORMAT_VERSION;
    let mut seen_header = false;
    let mut order: Vec<(&'static str, String)> = Vec::new();
    let mut latest: HashMap<(&'static str, String), (usize, Record)> = HashMap::new();
    for stream in streams {
        for (line, record) in stream {
            if let Record::Header {
                format_version,
                categories: cats,
            } = &record
            {
                seen_header = true;
                version = *format_version;
                for c in cats {
                    if !categories.contains(c) {
                        categories.push(c.clone());
                    }
                }
                continue;
            }
            let key = record.merge_key();
            if !latest.contains_key(&key) {
                order.push(key.clone());
            }
            latest.insert(key, (line, record));
        }
    }
    let mut out = Vec::with_capacity(order.len() + 1);
    if seen_header {
        out.push((
            0,
            Record::Header {
                format_version: version,
                categories,
            },
        ));
    }
    for key in order {
        if let Some(entry) = latest.remove(&key) {
            out.push(entry);
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    categories: Vec<String>,
    attributes: Vec<Attribute>,
    attr_index: HashMap<String, AttrId>,
    words: Vec<Word>,
    word_ids: HashMap<String, WordId>,
    surface_index: HashMap<String, WordId>,
    folded_index: HashMap<String, WordId>,
    equivs: Vec<EquivClass>,
    forms: Vec<Form>,
    form_ids: HashMap<String, FormId>,
    refs: Vec<Reference>,
    ref_ids: HashMap<String, RefId>,
    trie: FormTrie,
}

impl KnowledgeBase {
    /// Loads and fully validates a KB stream.
    pub fn load(reader: impl BufRead) -> Result<Self, KbError> {
        Self::from_records(parse_records(reader)?)
    }

    /// Loads a KB checking only structure (ids resolve, no duplicates),
    /// not the semantic invariants reported by [`validate`](Self::validate).
    pub fn load_lenient(reader: impl BufRead) -> Result<Self, KbError> {
        Self::from_records_lenient(parse_records(reader)?)
    }

    pub fn from_records(records: Vec<(usize, Record)>) -> Result<Self, KbError> {
        let kb = Self::from_records_lenient(records)?;
        let report = kb.validate();
        if let Some(Violation::SharedFormWithoutHomonym {
            key,
            references: (a, b),
        }) = report
            .violations
            .iter()
            .find(|v| matches!(v, Violation::SharedFormWithoutHomonym { .. }))
        {
            return Err(KbError::DuplicateFormWithoutHomonym {
                form: key.clone(),
                first: a.clone(),
                second: b.clone(),
            });
        }
        if !report.is_empty() {
            return Err(KbError::Invalid(report));
        }
        Ok(kb)
    }

    pub fn from_records_lenient(records: Vec<(usize, Record)>) -> Result<Self, KbError> {
        let mut kb = KnowledgeBase::default();
        // Pass 1: header and attributes, word/form/reference ids.
        for (line, record) in &records {
            let line = *line;
            match record {
                Record::Header {
                    format_version,
                    categories,
                } => {
                    if *format_version != FORMAT_VERSION {
                        return Err(KbError::Parse {
                            line,
                            message: format!("unsupported format version {format_version}"),
                        });
                    }
                    for c in categories {
                        if !kb.categories.contains(c) {
                            kb.categories.push(c.clone());
                        }
                        kb.declare_attribute(line, c, AttributeKind::Category)?;
                    }
                }
                Record::Attribute {
                    name,
                    attribute_kind,
                } => kb.declare_attribute(line, name, *attribute_kind)?,
                Record::Word { id, .. } => {
                    let wid = WordId(kb.word_ids.len() as u32);
                    if kb.word_ids.insert(id.clone(), wid).is_some() {
                        return Err(KbError::DuplicateId {
                            line,
                            id: id.clone(),
                        });
                    }
                }
                Record::Form { id, .. } => {
                    let fid = FormId(kb.form_ids.len() as u32);
                    if kb.form_ids.insert(id.clone(), fid).is_some() {
                        return Err(KbError::DuplicateId {
                            line,
                            id: id.clone(),
                        });
                    }
                }
                Record::Reference { id, .. } => {
                    let rid = RefId(kb.ref_ids.len() as u32);
                    if kb.ref_ids.insert(id.clone(), rid).is_some() {
                        return Err(KbError::DuplicateId {
                            line,
                            id: id.clone(),
                        });
                    }
                }
                Record::Equiv { .. } | Record::Homonym { .. } => {}
            }
        }

        // Pass 2: entities, in id order.
        let mut word_recs = Vec::new();
        let mut form_recs = Vec::new();
        let mut ref_recs = Vec::new();
        for (line, record) in &records {
            match record {
                Record::Word { .. } => word_recs.push((*line, record)),
                Record::Form { .. } => form_recs.push((*line, record)),
                Record::Reference { .. } => ref_recs.push((*line, record)),
                _ => {}
            }
        }

        for (line, record) in word_recs {
            let Record::Word {
                id,
                surface,
                attributes,
            } = record
            else {
                unreachable!()
            };
            let attributes = kb.resolve_attrs(line, attributes)?;
            let wid = WordId(kb.words.len() as u32);
            if kb.surface_index.insert(surface.clone(), wid).is_some() {
                return Err(KbError::DuplicateSurface {
                    line,
                    surface: surface.clone(),
                });
            }
            kb.folded_index.entry(fold_case(surface)).or_insert(wid);
            kb.words.push(Word {
                id: id.clone(),
                surface: surface.clone(),
                attributes,
                equiv_class: None,
            });
        }

        for (line, record) in &records {
            if let Record::Equiv { id, members } = record {
                let class = kb.equivs.len() as u32;
                let mut ids = Vec::with_capacity(members.len());
                for m in members {
                    let wid = kb.word_id(*line, m)?;
                    let word = &mut kb.words[wid.0 as usize];
                    if word.equiv_class.is_some() {
                        return Err(KbError::Parse {
                            line: *line,
                            message: format!("word `{m}` already belongs to an equivalence class"),
                        });
                    }
                    word.equiv_class = Some(class);
                    ids.push(wid);
                }
                kb.equivs.push(EquivClass {
                    id: id.clone(),
                    members: ids,
                });
            }
        }

        for (line, record) in form_recs {
            let Record::Form {
                id,
                words,
                reference,
            } = record
            else {
                unreachable!()
            };
            let words = words
                .iter()
                .map(|w| kb.word_id(line, w))
                .collect::<Result<Vec<_>, _>>()?;
            let reference = kb.ref_id(line, reference)?;
            kb.forms.push(Form {
                id: id.clone(),
                words,
                reference,
            });
        }

        for (line, record) in ref_recs {
            let Record::Reference {
                id,
                canonical_form,
                category,
                attributes,
                located_in,
                frequency_rank,
            } = record
            else {
                unreachable!()
            };
            let canonical_form =
                *kb.form_ids
                    .get(canonical_form)
                    .ok_or_else(|| KbError::DanglingId {
                        line,
                        id: canonical_form.clone(),
                    })?;
            let category = kb
                .category_id(category)
                .ok_or_else(|| KbError::DanglingId {
                    line,
                    id: category.clone(),
                })?;
            let attributes = kb.resolve_attrs(line, attributes)?;
            let located_in = located_in
                .iter()
                .map(|r| kb.ref_id(line, r))
                .collect::<Result<Vec<_>, _>>()?;
            kb.refs.push(Reference {
                id: id.clone(),
                canonical_form,
                forms: Vec::new(),
                category: Some(category),
                attributes,
                located_in,
                frequency_rank: *frequency_rank,
                homonyms: BTreeSet::new(),
            });
        }

        for (idx, form) in kb.forms.iter().enumerate() {
            kb.refs[form.reference.0 as usize]
                .forms
                .push(FormId(idx as u32));
        }

        for (line, record) in &records {
            if let Record::Homonym { pair } = record {
                let a = kb.ref_id(*line, &pair[0])?;
                let b = kb.ref_id(*line, &pair[1])?;
                if a != b {
                    kb.refs[a.0 as usize].homonyms.insert(b);
                    kb.refs[b.0 as usize].homonyms.insert(a);
                }
            }
        }

        for idx in 0..kb.forms.len() {
            let key = kb.form_key(FormId(idx as u32));
            kb.trie.insert(&key, FormId(idx as u32));
        }
        Ok(kb)
    }

    fn declare_attribute(
        &mut self,
        line: usize,
        name: &str,
        kind: AttributeKind,
    ) -> Result<(), KbError> {
        if let Some(&existing) = self.attr_index.get(name) {
            if self.attributes[existing.0 as usize].kind == kind {
                return Ok(());
            }
            return Err(KbError::DuplicateId {
                line,
                id: name.to_string(),
            });
        }
        let id = AttrId(self.attributes.len() as u16);
        self.attributes.push(Attribute {
            name: name.to_string(),
            kind,
        });
        self.attr_index.insert(name.to_string(), id);
        Ok(())
    }

    fn resolve_attrs(&self, line: usize, names: &[String]) -> Result<Vec<AttrId>, KbError> {
        let mut ids = names
            .iter()
            .map(|n| {
                self.attr_index
                    .get(n)
                    .copied()
                    .ok_or_else(|| KbError::DanglingId {
                        line,
                        id: n.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ids.sort();
        ids.dedup();
        Ok(ids)
    }

    fn word_id(&self, line: usize, id: &str) -> Result<WordId, KbError> {
        self.word_ids
            .get(id)
            .copied()
            .ok_or_else(|| KbError::DanglingId {
                line,
                id: id.to_string(),
            })
    }

    fn ref_id(&self, line: usize, id: &str) -> Result<RefId, KbError> {
        self.ref_ids
            .get(id)
            .copied()
            .ok_or_else(|| KbError::DanglingId {
                line,
                id: id.to_string(),
            })
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_id(&self, name: &str) -> Option<CategoryId> {
        self.categories
            .iter()
            .position(|c| c == name)
            .map(|i| CategoryId(i as u16))
    }

    pub fn category_name(&self, id: CategoryId) -> &str {
        &self.categories[id.0 as usize]
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute_id(&self, name: &str) -> Option<AttrId> {
        self.attr_index.get(name).copied()
    }

    pub fn attribute(&self, id: AttrId) -> &Attribute {
        &self.attributes[id.0 as usize]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, id: WordId) -> &Word {
        &self.words[id.0 as usize]
    }

    pub fn equiv_classes(&self) -> &[EquivClass] {
        &self.equivs
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn form(&self, id: FormId) -> &Form {
        &self.forms[id.0 as usize]
    }

    pub fn references(&self) -> &[Reference] {
        &self.refs
    }

    pub fn reference(&self, id: RefId) -> &Reference {
        &self.refs[id.0 as usize]
    }

    pub fn reference_id(&self, id: &str) -> Option<RefId> {
        self.ref_ids.get(id).copied()
    }

    pub fn form_id(&self, id: &str) -> Option<FormId> {
        self.form_ids.get(id).copied()
    }

    pub fn word_by_id(&self, id: &str) -> Option<WordId> {
        self.word_ids.get(id).copied()
    }

    pub(crate) fn trie(&self) -> &FormTrie {
        &self.trie
    }

    pub fn resolve_exact(&self, surface: &str) -> Option<WordId> {
        self.surface_index.get(surface).copied()
    }

    pub fn resolve_folded(&self, folded: &str) -> Option<WordId> {
        self.folded_index.get(folded).copied()
    }

    /// Exact surface first, then case-insensitive.
    pub fn resolve_word(&self, surface: &str) -> Option<WordId> {
        self.resolve_exact(surface)
            .or_else(|| self.resolve_folded(&fold_case(surface)))
    }

    /// Equivalence-class representative, as a key atom.
    pub fn canonical(&self, word: WordId) -> u32 {
        match self.words[word.0 as usize].equiv_class {
            Some(class) => self.equivs[class as usize].members[0].0,
            None => word.0,
        }
    }

    pub fn form_key(&self, form: FormId) -> Vec<u32> {
        self.forms[form.0 as usize]
            .words
            .iter()
            .map(|&w| self.canonical(w))
            .collect()
    }

    /// References owning a form spelled by `words` (one surface per word).
    /// More than one result means the form is homonymous.
    pub fn lookup_form(&self, words: &[&str]) -> BTreeSet<RefId> {
        let mut key = Vec::with_capacity(words.len());
        for w in words {
            match self.resolve_word(w) {
                Some(id) => key.push(self.canonical(id)),
                None => return BTreeSet::new(),
            }
        }
        if key.is_empty() {
            return BTreeSet::new();
        }
        self.trie
            .get(&key)
            .iter()
            .map(|&f| self.forms[f.0 as usize].reference)
            .collect()
    }

    pub fn form_surface(&self, form: FormId) -> String {
        self.forms[form.0 as usize]
            .words
            .iter()
            .map(|&w| self.words[w.0 as usize].surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Checks every invariant and lists the violations; an empty report
    /// means the KB is valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        for attr in &self.attributes {
            if attr.kind == AttributeKind::Category && !self.categories.contains(&attr.name) {
                violations.push(Violation::CategoryOutsideSet {
                    attribute: attr.name.clone(),
                });
            }
        }
        for word in &self.words {
            if word.surface.is_empty() || word.surface.chars().any(char::is_whitespace) {
                violations.push(Violation::MultiTokenSurface {
                    word: word.id.clone(),
                    surface: word.surface.clone(),
                });
            }
        }
        for class in &self.equivs {
            if class.members.len() < 2 {
                violations.push(Violation::SingletonEquivClass {
                    class: class.id.clone(),
                });
            }
        }
        for form in &self.forms {
            if form.words.is_empty() {
                violations.push(Violation::EmptyForm {
                    form: form.id.clone(),
                });
            }
        }
        for (idx, reference) in self.refs.iter().enumerate() {
            if self.forms[reference.canonical_form.0 as usize].reference != RefId(idx as u32) {
                violations.push(Violation::CanonicalFormNotOwned {
                    reference: reference.id.clone(),
                    form: self.forms[reference.canonical_form.0 as usize].id.clone(),
                });
            }
        }
        for (idx, reference) in self.refs.iter().enumerate() {
            for other in &reference.homonyms {
                if !self.refs[other.0 as usize]
                    .homonyms
                    .contains(&RefId(idx as u32))
                {
                    violations.push(Violation::AsymmetricHomonym {
                        from: reference.id.clone(),
                        to: self.refs[other.0 as usize].id.clone(),
                    });
                }
            }
        }

        let mut owners: BTreeMap<Vec<u32>, BTreeSet<RefId>> = BTreeMap::new();
        for (idx, form) in self.forms.iter().enumerate() {
            if form.words.is_empty() {
                continue;
            }
            owners
                .entry(self.form_key(FormId(idx as u32)))
                .or_default()
                .insert(form.reference);
        }
        for (key, refs) in owners {
            let refs: Vec<RefId> = refs.into_iter().collect();
            for (i, &a) in refs.iter().enumerate() {
                for &b in &refs[i + 1..] {
                    if !self.refs[a.0 as usize].homonyms.contains(&b) {
                        let surface = key
                            .iter()
                            .map(|&w| self.words[w as usize].surface.as_str())
                            .collect::<Vec<_>>()
                            .join(" ");
                        violations.push(Violation::SharedFormWithoutHomonym {
                            key: surface,
                            references: (
                                self.refs[a.0 as usize].id.clone(),
                                self.refs[b.0 as usize].id.clone(),
                            ),
                        });
                    }
                }
            }
        }

        ValidationReport { violations }
    }

    /// Serialises the KB back to records. `load(to_records())` rebuilds an
    /// equivalent KB.
    pub fn to_records(&self) -> Vec<Record> {
        let mut out = vec![Record::Header {
            format_version: FORMAT_VERSION,
            categories: self.categories.clone(),
        }];
        for attr in &self.attributes {
            if attr.kind == AttributeKind::Category && self.categories.contains(&attr.name) {
                continue;
            }
            out.push(Record::Attribute {
                name: attr.name.clone(),
                attribute_kind: attr.kind,
            });
        }
        let attr_names = |ids: &[AttrId]| -> Vec<String> {
            ids.iter()
                .map(|a| self.attributes[a.0 as usize].name.clone())
                .collect()
        };
        for word in &self.words {
            out.push(Record::Word {
                id: word.id.clone(),
                surface: word.surface.clone(),
                attributes: attr_names(&word.attributes),
            });
        }
        for class in &self.equivs {
            out.push(Record::Equiv {
                id: class.id.clone(),
                members: class
                    .members
                    .iter()
                    .map(|w| self.words[w.0 as usize].id.clone())
                    .collect(),
            });
        }
        for form in &self.forms {
            out.push(Record::Form {
                id: form.id.clone(),
                words: form
                    .words
                    .iter()
                    .map(|w| self.words[w.0 as usize].id.clone())
                    .collect(),
                reference: self.refs[form.reference.0 as usize].id.clone(),
            });
        }
        for reference in &self.refs {
            out.push(Record::Reference {
                id: reference.id.clone(),
                canonical_form: self.forms[reference.canonical_form.0 as usize].id.clone(),
                category: reference
                    .category
                    .map(|c| self.categories[c.0 as usize].clone())
                    .unwrap_or_default(),
                attributes: attr_names(&reference.attributes),
                located_in: reference
                    .located_in
                    .iter()
                    .map(|r| self.refs[r.0 as usize].id.clone())
                    .collect(),
                frequency_rank: reference.frequency_rank,
            });
        }
        for (idx, reference) in self.refs.iter().enumerate() {
            for other in &reference.homonyms {
                if other.0 > idx as u32 {
                    out.push(Record::Homonym {
                        pair: [reference.id.clone(), self.refs[other.0 as usize].id.clone()],
                    });
                }
            }
        }
        out
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for record in self.to_records() {
            serde_json::to_writer(&mut w, &record)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn stats(&self) -> KbStats {
        let mut per_category: BTreeMap<String, usize> = BTreeMap::new();
        for c in &self.categories {
            per_category.insert(c.clone(), 0);
        }
        for r in &self.refs {
            if let Some(c) = r.category {
                *per_category
                    .entry(self.categories[c.0 as usize].clone())
                    .or_default() += 1;
            }
        }
        let homonym_pairs = self.refs.iter().map(|r| r.homonyms.len()).sum::<usize>() / 2;
        KbStats {
            words: self.words.len(),
            equiv_classes: self.equivs.len(),
            forms: self.forms.len(),
            references: self.refs.len(),
            attributes: self.attributes.len(),
            homonym_pairs,
            references_per_category: per_category,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KbStats {
    pub words: usize,
    pub equiv_classes: usize,
    pub forms: usize,
    pub references: usize,
    pub attributes: usize,
    pub homonym_pairs: usize,
    pub references_per_category: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    SharedFormWithoutHomonym {
        key: String,
        references: (String, String),
    },
    SingletonEquivClass {
        class: String,
    },
    AsymmetricHomonym {
        from: String,
        to: String,
    },
    CanonicalFormNotOwned {
        reference: String,
        form: String,
    },
    EmptyForm {
        form: String,
    },
    MultiTokenSurface {
        word: String,
        surface: String,
    },
    CategoryOutsideSet {
        attribute: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SharedFormWithoutHomonym {
                key,
                references: (a, b),
            } => write!(
                f,
                "form `{key}` shared by `{a}` and `{b}` without homonym link"
            ),
            Violation::SingletonEquivClass { class } => {
                write!(f, "equivalence class `{class}` has a single member")
            }
            Violation::AsymmetricHomonym { from, to } => {
                write!(f, "homonym link `{from}` -> `{to}` is not reciprocated")
            }
            Violation::CanonicalFormNotOwned { reference, form } => {
                write!(
                    f,
                    "canonical form `{form}` of `{reference}` belongs to another reference"
                )
            }
            Violation::EmptyForm { form } => write!(f, "form `{form}` has no words"),
            Violation::MultiTokenSurface { word, surface } => {
                write!(f, "word `{word}` surface {surface:?} is not a single token")
            }
            Violation::CategoryOutsideSet { attribute } => {
                write!(
                    f,
                    "category attribute `{attribute}` is not in the header category set"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NEW_YORK: &str = r#"{"kind":"header","format_version":1,"categories":["location","company"]}
{"kind":"word","id":"w:new","surface":"New"}
{"kind":"word","id":"w:york","surface":"York"}
{"kind":"form","id":"f:ny","words":["w:new","w:york"],"reference":"r:ny"}
{"kind":"reference","id":"r:ny","canonical_form":"f:ny","category":"location"}
"#;

    #[test]
    fn new_york_resolves_to_location() {
        let kb = KnowledgeBase::load(NEW_YORK.as_bytes()).unwrap();
        let refs = kb.lookup_form(&["New", "York"]);
        assert_eq!(refs.len(), 1);
        let r = kb.reference(*refs.iter().next().unwrap());
        assert_eq!(r.id, "r:ny");
        assert_eq!(kb.category_name(r.category.unwrap()), "location");
        // case-folded fallback
        assert_eq!(kb.lookup_form(&["NEW", "york"]), refs);
    }

    #[test]
    fn empty_stream_is_empty_kb() {
        let kb = KnowledgeBase::load("".as_bytes()).unwrap();
        assert!(kb.lookup_form(&["New"]).is_empty());
        assert!(kb.validate().is_empty());
        assert_eq!(kb.stats().references, 0);
    }

    #[test]
    fn dangling_word_is_named() {
        let src = r#"{"kind":"header","format_version":1,"categories":["location"]}
{"kind":"form","id":"f:x","words":["w:missing"],"reference":"r:x"}
{"kind":"reference","id":"r:x","canonical_form":"f:x","category":"location"}
"#;
        match KnowledgeBase::load(src.as_bytes()) {
            Err(KbError::DanglingId { id, line }) => {
                assert_eq!(id, "w:missing");
                assert_eq!(line, 2);
            }
            other => panic!("expected dangling id, got {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_and_bad_json_report_lines() {
        let src =
            "{\"kind\":\"header\",\"format_version\":1,\"categories\":[]}\n{\"kind\":\"gizmo\"}\n";
        assert!(matches!(
            KnowledgeBase::load(src.as_bytes()),
            Err(KbError::UnknownRecordKind { line: 2, .. })
        ));
        let src = "\n{not json\n";
        assert!(matches!(
            KnowledgeBase::load(src.as_bytes()),
            Err(KbError::Parse { line: 2, .. })
        ));
    }

    const SHARED: &str = r#"{"kind":"header","format_version":1,"categories":["company"]}
{"kind":"word","id":"w:cdc","surface":"CDC"}
{"kind":"form","id":"f:a","words":["w:cdc"],"reference":"r:a"}
{"kind":"form","id":"f:b","words":["w:cdc"],"reference":"r:b"}
{"kind":"reference","id":"r:a","canonical_form":"f:a","category":"company"}
{"kind":"reference","id":"r:b","canonical_form":"f:b","category":"company"}
"#;

    #[test]
    fn shared_form_without_link_is_flagged() {
        assert!(matches!(
            KnowledgeBase::load(SHARED.as_bytes()),
            Err(KbError::DuplicateFormWithoutHomonym { .. })
        ));
        let kb = KnowledgeBase::load_lenient(SHARED.as_bytes()).unwrap();
        let report = kb.validate();
        assert_eq!(
            report.violations,
            vec![Violation::SharedFormWithoutHomonym {
                key: "CDC".into(),
                references: ("r:a".into(), "r:b".into())
            }]
        );

        let linked = format!("{SHARED}{{\"kind\":\"homonym\",\"pair\":[\"r:b\",\"r:a\"]}}\n");
        let kb = KnowledgeBase::load(linked.as_bytes()).unwrap();
        assert_eq!(kb.lookup_form(&["CDC"]).len(), 2);
    }

    #[test]
    fn singleton_equiv_class_is_flagged() {
        let src = r#"{"kind":"header","format_version":1,"categories":["company"]}
{"kind":"word","id":"w:and","surface":"and"}
{"kind":"equiv","id":"eq:and","members":["w:and"]}
"#;
        let kb = KnowledgeBase::load_lenient(src.as_bytes()).unwrap();
        assert_eq!(
            kb.validate().violations,
            vec![Violation::SingletonEquivClass {
                class: "eq:and".into()
            }]
        );
        assert!(matches!(
            KnowledgeBase::load(src.as_bytes()),
            Err(KbError::Invalid(_))
        ));
    }

    #[test]
    fn later_streams_override_earlier() {
        let a = parse_records(NEW_YORK.as_bytes()).unwrap();
        let b = parse_records(
            r#"{"kind":"header","format_version":1,"categories":["city"]}
{"kind":"reference","id":"r:ny","canonical_form":"f:ny","category":"city","frequency_rank":3}
"#
            .as_bytes(),
        )
        .unwrap();
        let kb = KnowledgeBase::from_records(merge_record_streams(vec![a, b])).unwrap();
        assert_eq!(kb.categories(), &["location", "company", "city"]);
        let r = kb.reference(kb.reference_id("r:ny").unwrap());
        assert_eq!(kb.category_name(r.category.unwrap()), "city");
        assert_eq!(r.frequency_rank, 3);
    }
}
