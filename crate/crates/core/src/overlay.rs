//! Per-document extension layer over an immutable [`KnowledgeBase`].
//!
//! Overlay entities get ids past the end of the base id ranges, so a
//! `RefId`/`FormId`/`WordId` is meaningful against the `DocumentKb` that
//! issued it. Lookups consult the overlay before falling back to the base.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::kb::{AttrId, CategoryId, Form, FormId, KnowledgeBase, RefId, Reference, Word, WordId};
use crate::text::fold_case;
use crate::trie::FormTrie;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlayOrigin {
    AcronymDefinition,
    PrototypeName,
    Other,
}

#[derive(Debug, Clone)]
pub struct NewReference {
    pub id: String,
    pub category: Option<CategoryId>,
    pub attributes: Vec<AttrId>,
    pub origin: OverlayOrigin,
}

#[derive(Debug, Clone)]
pub struct DocumentKb<'a> {
    base: &'a KnowledgeBase,
    words: Vec<Word>,
    surface_index: HashMap<String, WordId>,
    folded_index: HashMap<String, WordId>,
    forms: Vec<Form>,
    refs: Vec<Reference>,
    origins: Vec<OverlayOrigin>,
    ref_index: HashMap<String, RefId>,
    attached: BTreeMap<RefId, Vec<FormId>>,
    extra_homonyms: BTreeMap<RefId, BTreeSet<RefId>>,
    trie: FormTrie,
}

const NO_FORM: FormId = FormId(u32::MAX);

impl<'a> DocumentKb<'a> {
    pub fn new(base: &'a KnowledgeBase) -> Self {
        Self {
            base,
            words: Vec::new(),
            surface_index: HashMap::new(),
            folded_index: HashMap::new(),
            forms: Vec::new(),
            refs: Vec::new(),
            origins: Vec::new(),
            ref_index: HashMap::new(),
            attached: BTreeMap::new(),
            extra_homonyms: BTreeMap::new(),
            trie: FormTrie::new(),
        }
    }

    pub fn base(&self) -> &'a KnowledgeBase {
        self.base
    }

    fn base_words(&self) -> u32 {
        self.base.words().len() as u32
    }

    fn base_forms(&self) -> u32 {
        self.base.forms().len() as u32
    }

    fn base_refs(&self) -> u32 {
        self.base.references().len() as u32
    }

    pub fn is_overlay_ref(&self, id: RefId) -> bool {
        id.0 >= self.base_refs()
    }

    pub fn overlay_is_empty(&self) -> bool {
        self.refs.is_empty() && self.attached.is_empty()
    }

    pub fn overlay_references(&self) -> impl Iterator<Item = RefId> + '_ {
        let offset = self.base_refs();
        (0..self.refs.len() as u32).map(move |i| RefId(offset + i))
    }

    pub fn origin(&self, id: RefId) -> Option<OverlayOrigin> {
        id.0.checked_sub(self.base_refs())
            .and_then(|i| self.origins.get(i as usize).copied())
    }

    pub fn word(&self, id: WordId) -> &Word {
        match id.0.checked_sub(self.base_words()) {
            Some(i) => &self.words[i as usize],
            None => self.base.word(id),
        }
    }

    pub fn form(&self, id: FormId) -> &Form {
        match id.0.checked_sub(self.base_forms()) {
            Some(i) => &self.forms[i as usize],
            None => self.base.form(id),
        }
    }

    pub fn reference(&self, id: RefId) -> &Reference {
        match id.0.checked_sub(self.base_refs()) {
            Some(i) => &self.refs[i as usize],
            None => self.base.reference(id),
        }
    }

    pub fn reference_id(&self, id: &str) -> Option<RefId> {
        self.ref_index
            .get(id)
            .copied()
            .or_else(|| self.base.reference_id(id))
    }

    pub fn category_of(&self, id: RefId) -> Option<CategoryId> {
        self.reference(id).category
    }

    pub fn category_name(&self, id: CategoryId) -> &str {
        self.base.category_name(id)
    }

    /// Sets the category of an uncategorised overlay reference.
    pub fn set_category(&mut self, id: RefId, category: CategoryId) {
        if let Some(i) = id.0.checked_sub(self.base_refs()) {
            let r = &mut self.refs[i as usize];
            if r.category.is_none() {
                r.category = Some(category);
            }
        }
    }

    /// All forms of a reference, including overlay forms attached to a
    /// base reference.
    pub fn forms_of(&self, id: RefId) -> Vec<FormId> {
        let mut forms = self.reference(id).forms.clone();
        if let Some(extra) = self.attached.get(&id) {
            forms.extend_from_slice(extra);
        }
        forms
    }

    pub fn homonyms_of(&self, id: RefId) -> BTreeSet<RefId> {
        let mut out = self.reference(id).homonyms.clone();
        if let Some(extra) = self.extra_homonyms.get(&id) {
            out.extend(extra.iter().copied());
        }
        out
    }

    pub fn resolve_word(&self, surface: &str) -> Option<WordId> {
        if let Some(w) = self.base.resolve_exact(surface) {
            return Some(w);
        }
        if let Some(&w) = self.surface_index.get(surface) {
            return Some(w);
        }
        let folded = fold_case(surface);
        self.base
            .resolve_folded(&folded)
            .or_else(|| self.folded_index.get(&folded).copied())
    }

    pub fn canonical(&self, word: WordId) -> u32 {
        if word.0 >= self.base_words() {
            word.0
        } else {
            self.base.canonical(word)
        }
    }

    pub fn word_has_attribute(&self, word: WordId, attr: AttrId) -> bool {
        self.word(word).has_attribute(attr)
    }

    /// Resolves a surface and reports whether its word carries `attr`.
    pub fn surface_has_attribute(&self, surface: &str, attr: Option<AttrId>) -> bool {
        match (attr, self.resolve_word(surface)) {
            (Some(a), Some(w)) => self.word_has_attribute(w, a),
            _ => false,
        }
    }

    pub(crate) fn base_trie(&self) -> &FormTrie {
        self.base.trie()
    }

    pub(crate) fn overlay_trie(&self) -> &FormTrie {
        &self.trie
    }

    pub fn form_key(&self, form: FormId) -> Vec<u32> {
        self.form(form)
            .words
            .iter()
            .map(|&w| self.canonical(w))
            .collect()
    }

    /// Forms (base and overlay) whose canonical key equals `key`.
    pub fn forms_with_key(&self, key: &[u32]) -> Vec<FormId> {
        let mut out: Vec<FormId> = self.trie.get(key).to_vec();
        out.extend_from_slice(self.base.trie().get(key));
        out.sort();
        out
    }

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
        self.forms_with_key(&key)
            .into_iter()
            .map(|f| self.form(f).reference)
            .collect()
    }

    pub fn form_surface(&self, form: FormId) -> String {
        self.form(form)
            .words
            .iter()
            .map(|&w| self.word(w).surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Display id of a reference.
    pub fn reference_label(&self, id: RefId) -> &str {
        &self.reference(id).id
    }

    /// Adds (or extends) an overlay reference with the given forms, each a
    /// sequence of word surfaces. Re-adding an existing form is a no-op.
    /// A form that collides with a form of another reference links the
    /// two references as homonyms.
    pub fn extend_overlay(&mut self, reference: NewReference, forms: &[Vec<String>]) -> RefId {
        let rid = match self.ref_index.get(&reference.id) {
            Some(&r) => r,
            None => {
                let rid = RefId(self.base_refs() + self.refs.len() as u32);
                self.refs.push(Reference {
                    id: reference.id.clone(),
                    canonical_form: NO_FORM,
                    forms: Vec::new(),
                    category: reference.category,
                    attributes: reference.attributes.clone(),
                    located_in: Vec::new(),
                    frequency_rank: u32::MAX,
                    homonyms: BTreeSet::new(),
                });
                self.origins.push(reference.origin);
                self.ref_index.insert(reference.id.clone(), rid);
                rid
            }
        };
        self.attach_forms(rid, forms);
        rid
    }

    /// Adds forms to an existing reference (base or overlay).
    pub fn attach_forms(&mut self, rid: RefId, forms: &[Vec<String>]) {
        for surfaces in forms {
            if surfaces.is_empty() {
                continue;
            }
            let fid = self.add_form(rid, surfaces);
            if let Some(i) = rid.0.checked_sub(self.base_refs()) {
                let r = &mut self.refs[i as usize];
                if r.canonical_form == NO_FORM {
                    r.canonical_form = fid;
                }
            }
        }
    }

    fn add_form(&mut self, rid: RefId, surfaces: &[String]) -> FormId {
        let words: Vec<WordId> = surfaces.iter().map(|s| self.intern_word(s)).collect();
        let key: Vec<u32> = words.iter().map(|&w| self.canonical(w)).collect();
        let existing = self.forms_with_key(&key);
        if let Some(&same) = existing.iter().find(|&&f| self.form(f).reference == rid) {
            return same;
        }
        let owners: BTreeSet<RefId> = existing.iter().map(|&f| self.form(f).reference).collect();
        for owner in owners {
            self.link_homonyms(rid, owner);
        }
        let fid = FormId(self.base_forms() + self.forms.len() as u32);
        self.forms.push(Form {
            id: format!("{}#form{}", self.reference(rid).id, self.forms.len()),
            words,
            reference: rid,
        });
        self.trie.insert(&key, fid);
        match rid.0.checked_sub(self.base_refs()) {
            Some(i) => self.refs[i as usize].forms.push(fid),
            None => self.attached.entry(rid).or_default().push(fid),
        }
        fid
    }

    fn intern_word(&mut self, surface: &str) -> WordId {
        if let Some(w) = self.resolve_word(surface) {
            return w;
        }
        let wid = WordId(self.base_words() + self.words.len() as u32);
        self.words.push(Word {
            id: format!("overlay:{surface}"),
            surface: surface.to_string(),
            attributes: Vec::new(),
            equiv_class: None,
        });
        self.surface_index.insert(surface.to_string(), wid);
        self.folded_index.entry(fold_case(surface)).or_insert(wid);
        wid
    }

    fn link_homonyms(&mut self, a: RefId, b: RefId) {
        if a == b {
            return;
        }
        for (x, y) in [(a, b), (b, a)] {
            match x.0.checked_sub(self.base_refs()) {
                Some(i) => {
                    self.refs[i as usize].homonyms.insert(y);
                }
                None => {
                    self.extra_homonyms.entry(x).or_default().insert(y);
                }
            }
        }
    }
}
