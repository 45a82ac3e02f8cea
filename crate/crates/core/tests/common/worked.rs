//! Worked examples from the original description of the method, run
//! against the bundled sample KB and rule pack.

use std::collections::BTreeSet;

use propnames::classifier::{apply_local_context, apply_prototypes, detect_unknown_segments};
use propnames::coref::{detect_acronym_defs, match_acronym_letters, AcronymOrder};
use propnames::matcher::{match_known, normalize_sequence};
use propnames::mention::Method;
use propnames::overlay::{DocumentKb, NewReference, OverlayOrigin};
use propnames::tokenizer::tokenize;

use super::{analyze, annotator, record_for, sample};

pub type Case = (&'static str, fn() -> Result<(), String>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ids(dkb: &DocumentKb<'_>, refs: &BTreeSet<propnames::kb::RefId>) -> BTreeSet<String> {
    refs.iter()
        .map(|&r| dkb.reference_label(r).to_string())
        .collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

const SAINT_LOUIS: &[&str] = &[
    "r:cristalleries-saint-louis",
    "r:hopital-saint-louis",
    "r:saint-louis-bas-rhin",
    "r:saint-louis-food",
    "r:saint-louis-missouri",
];

pub const CASES: &[Case] = &[
    ("new_york_form_is_a_location", new_york_form_is_a_location),
    ("hexagone_names_france", hexagone_names_france),
    (
        "saint_louis_form_has_five_readings",
        saint_louis_form_has_five_readings,
    ),
    (
        "acronym_overlay_holds_both_forms",
        acronym_overlay_holds_both_forms,
    ),
    (
        "colliding_acronym_joins_as_homonym",
        colliding_acronym_joins_as_homonym,
    ),
    ("hyphenated_place_tokens", hyphenated_place_tokens),
    ("elided_article_is_standalone", elided_article_is_standalone),
    (
        "standard_et_poors_via_equivalence",
        standard_et_poors_via_equivalence,
    ),
    (
        "saint_louis_mention_is_ambiguous",
        saint_louis_mention_is_ambiguous,
    ),
    (
        "abbreviated_generale_shares_key",
        abbreviated_generale_shares_key,
    ),
    (
        "hyphen_is_transparent_in_keys",
        hyphen_is_transparent_in_keys,
    ),
    (
        "first_and_last_name_form_one_segment",
        first_and_last_name_form_one_segment,
    ),
    ("sur_bridges_a_segment", sur_bridges_a_segment),
    ("legal_form_makes_a_company", legal_form_makes_a_company),
    (
        "company_hyphen_country_is_a_company",
        company_hyphen_country_is_a_company,
    ),
    (
        "chained_extension_builds_subsidiary",
        chained_extension_builds_subsidiary,
    ),
    ("apposition_marks_a_person", apposition_marks_a_person),
    ("mayor_of_marks_a_town", mayor_of_marks_a_town),
    ("mayor_of_prunes_saint_louis", mayor_of_prunes_saint_louis),
    ("expansion_then_acronym", expansion_then_acronym),
    ("acronym_then_expansion", acronym_then_expansion),
    ("sbf_skips_des", sbf_skips_des),
    ("bdf_keeps_de", bdf_keeps_de),
    ("credes_long_expansion", credes_long_expansion),
    (
        "bare_radical_links_to_company",
        bare_radical_links_to_company,
    ),
    (
        "shared_radical_stays_doubtful",
        shared_radical_stays_doubtful,
    ),
    ("hospital_wins_by_form_count", hospital_wins_by_form_count),
    ("isolated_title_falls_back", isolated_title_falls_back),
    ("express_sells_le_point", express_sells_le_point),
];

pub fn new_york_form_is_a_location() -> Result<(), String> {
    let kb = &sample().kb;
    let refs = kb.lookup_form(&["New", "York"]);
    ensure!(refs.len() == 1, "expected one reference, got {refs:?}");
    let r = kb.reference(*refs.iter().next().unwrap());
    ensure!(r.id == "r:new-york", "got {}", r.id);
    ensure!(
        kb.category_name(r.category.unwrap()) == "location",
        "not a location"
    );
    Ok(())
}

pub fn hexagone_names_france() -> Result<(), String> {
    let kb = &sample().kb;
    let refs: Vec<_> = kb
        .lookup_form(&["Hexagone"])
        .into_iter()
        .map(|r| kb.reference(r).id.clone())
        .collect();
    ensure!(refs == ["r:france"], "got {refs:?}");
    Ok(())
}

pub fn saint_louis_form_has_five_readings() -> Result<(), String> {
    let dkb = DocumentKb::new(&sample().kb);
    let got = ids(&dkb, &dkb.lookup_form(&["Saint", "Louis"]));
    ensure!(got == set(SAINT_LOUIS), "got {got:?}");
    Ok(())
}

pub fn acronym_overlay_holds_both_forms() -> Result<(), String> {
    let doc = tokenize(
        "t",
        "The International Primary Aluminium Institute (IPAI) said.",
    );
    let mut dkb = DocumentKb::new(&sample().kb);
    let known = match_known(&doc, &dkb);
    let found = detect_acronym_defs(&doc, &mut dkb, &known);
    ensure!(found.len() == 1, "expected one definition, got {found:?}");
    let a = dkb.lookup_form(&["IPAI"]);
    let b = dkb.lookup_form(&["International", "Primary", "Aluminium", "Institute"]);
    ensure!(a.len() == 1 && a == b, "forms resolve to {a:?} and {b:?}");
    ensure!(
        dkb.is_overlay_ref(*a.iter().next().unwrap()),
        "not an overlay reference"
    );
    Ok(())
}

pub fn colliding_acronym_joins_as_homonym() -> Result<(), String> {
    let kb = &sample().kb;
    let mut dkb = DocumentKb::new(kb);
    let rid = dkb.extend_overlay(
        NewReference {
            id: "doc:acronym:CDC".into(),
            category: None,
            attributes: Vec::new(),
            origin: OverlayOrigin::AcronymDefinition,
        },
        &[
            vec!["CDC".into()],
            vec!["Centre".into(), "des".into(), "Congrès".into()],
        ],
    );
    let base = kb.reference_id("r:cdc").unwrap();
    ensure!(dkb.homonyms_of(rid).contains(&base), "no link from overlay");
    ensure!(dkb.homonyms_of(base).contains(&rid), "no link from base");
    let both = dkb.lookup_form(&["CDC"]);
    ensure!(both == BTreeSet::from([base, rid]), "lookup gave {both:?}");
    Ok(())
}

pub fn hyphenated_place_tokens() -> Result<(), String> {
    let doc = tokenize("t", "Condé-sur-Huisne");
    let got: Vec<&str> = doc.tokens.iter().map(|t| t.surface.as_str()).collect();
    ensure!(got == ["Condé", "-", "sur", "-", "Huisne"], "got {got:?}");
    Ok(())
}

pub fn elided_article_is_standalone() -> Result<(), String> {
    let doc = tokenize("t", "Agence Internationale de l' Energie Atomique");
    let got: Vec<&str> = doc.tokens.iter().map(|t| t.surface.as_str()).collect();
    ensure!(
        got == [
            "Agence",
            "Internationale",
            "de",
            "l'",
            "Energie",
            "Atomique"
        ],
        "got {got:?}"
    );
    Ok(())
}

pub fn standard_et_poors_via_equivalence() -> Result<(), String> {
    let doc = tokenize("t", "Standard et Poor's");
    let dkb = DocumentKb::new(&sample().kb);
    let ms = match_known(&doc, &dkb);
    ensure!(ms.len() == 1 && ms[0].tokens() == (0..3), "got {ms:?}");
    let got = ids(&dkb, &ms[0].candidates);
    ensure!(got == set(&["r:standard-and-poors"]), "got {got:?}");
    Ok(())
}

pub fn saint_louis_mention_is_ambiguous() -> Result<(), String> {
    let doc = tokenize("t", "Saint-Louis");
    let dkb = DocumentKb::new(&sample().kb);
    let ms = match_known(&doc, &dkb);
    ensure!(ms.len() == 1, "got {ms:?}");
    ensure!(
        ids(&dkb, &ms[0].candidates) == set(SAINT_LOUIS),
        "wrong candidates"
    );
    ensure!(ms[0].doubtful, "five readings should be doubtful");
    Ok(())
}

pub fn abbreviated_generale_shares_key() -> Result<(), String> {
    let kb = &sample().kb;
    let dkb = DocumentKb::new(kb);
    let doc = tokenize("t", "Sté générale");
    let key = normalize_sequence(&dkb, &doc.tokens).ok_or("unknown word")?;
    let form = kb.form_id("f:societe-generale").unwrap();
    ensure!(key == kb.form_key(form), "keys differ");
    Ok(())
}

pub fn hyphen_is_transparent_in_keys() -> Result<(), String> {
    let dkb = DocumentKb::new(&sample().kb);
    let a = normalize_sequence(&dkb, &tokenize("t", "New-York").tokens);
    let b = normalize_sequence(&dkb, &tokenize("t", "New York").tokens);
    ensure!(a.is_some() && a == b, "{a:?} != {b:?}");
    Ok(())
}

pub fn first_and_last_name_form_one_segment() -> Result<(), String> {
    let s = sample();
    let doc = tokenize("t", "He met André Blavier yesterday.");
    let dkb = DocumentKb::new(&s.kb);
    let known = match_known(&doc, &dkb);
    let segs = detect_unknown_segments(&doc, &dkb, &known, &s.rules);
    ensure!(
        matches!(segs.as_slice(), [r] if *r == (2..4)),
        "got {segs:?}"
    );
    Ok(())
}

pub fn sur_bridges_a_segment() -> Result<(), String> {
    let s = sample();
    let doc = tokenize("t", "Condé-sur-Huisne");
    let dkb = DocumentKb::new(&s.kb);
    let segs = detect_unknown_segments(&doc, &dkb, &[], &s.rules);
    ensure!(
        matches!(segs.as_slice(), [r] if *r == (0..5)),
        "got {segs:?}"
    );
    Ok(())
}

fn prototype_of(text: &str) -> Result<(String, String), String> {
    let s = sample();
    let doc = tokenize("t", text);
    let dkb = DocumentKb::new(&s.kb);
    let known = match_known(&doc, &dkb);
    let segs = detect_unknown_segments(&doc, &dkb, &known, &s.rules);
    let seg = segs.first().cloned().unwrap_or(0..0);
    let m = if seg.is_empty() {
        // no unknown word: extension over known mentions only
        let a = analyze(text);
        a.mentions
            .into_iter()
            .find(|m| m.method == Method::Prototype)
    } else {
        apply_prototypes(seg, &doc, &dkb, &s.rules.prototypes, &known)
    }
    .ok_or("no prototype fired")?;
    ensure!(m.method == Method::Prototype, "method {:?}", m.method);
    Ok((
        m.surface,
        s.kb.category_name(m.category.unwrap()).to_string(),
    ))
}

pub fn legal_form_makes_a_company() -> Result<(), String> {
    let got = prototype_of("Kyocera Corp")?;
    ensure!(
        got == ("Kyocera Corp".into(), "company".into()),
        "got {got:?}"
    );
    Ok(())
}

pub fn company_hyphen_country_is_a_company() -> Result<(), String> {
    let got = prototype_of("IBM-France")?;
    ensure!(
        got == ("IBM-France".into(), "company".into()),
        "got {got:?}"
    );
    Ok(())
}

pub fn chained_extension_builds_subsidiary() -> Result<(), String> {
    let got = prototype_of("Siam Nissan Automobile Co Ltd")?;
    ensure!(
        got == ("Siam Nissan Automobile Co Ltd".into(), "company".into()),
        "got {got:?}"
    );
    Ok(())
}

fn category_of(text: &str, surface: &str) -> Result<(String, Method), String> {
    let a = analyze(text);
    let records = propnames::pipeline::records(&a);
    let r =
        record_for(&records, text, surface, 0).ok_or_else(|| format!("no record for {surface}"))?;
    Ok((r.category.clone(), r.method))
}

pub fn apposition_marks_a_person() -> Result<(), String> {
    let got = category_of("Peskine, director of the group, resigned.", "Peskine")?;
    ensure!(
        got == ("human-being".into(), Method::LocalContext),
        "got {got:?}"
    );
    Ok(())
}

pub fn mayor_of_marks_a_town() -> Result<(), String> {
    let got = category_of("He spoke to the mayor of Gisenyi.", "Gisenyi")?;
    ensure!(
        got == ("location".into(), Method::LocalContext),
        "got {got:?}"
    );
    Ok(())
}

pub fn mayor_of_prunes_saint_louis() -> Result<(), String> {
    let s = sample();
    let doc = tokenize("t", "the mayor of St-Louis");
    let dkb = DocumentKb::new(&s.kb);
    let known = match_known(&doc, &dkb);
    let m = known
        .iter()
        .find(|m| m.is_ambiguous())
        .ok_or("no ambiguous mention")?;
    ensure!(m.candidates.len() == 5, "expected five readings");
    let out = apply_local_context(m, &doc, &dkb, &s.rules, &known);
    let got = ids(&dkb, &out.candidates);
    ensure!(
        got == set(&["r:saint-louis-bas-rhin", "r:saint-louis-missouri"]),
        "got {got:?}"
    );
    ensure!(out.tokens() == m.tokens(), "span changed");
    Ok(())
}

fn definition(text: &str) -> Result<(AcronymOrder, String, String), String> {
    let doc = tokenize("t", text);
    let mut dkb = DocumentKb::new(&sample().kb);
    let known = match_known(&doc, &dkb);
    let found = detect_acronym_defs(&doc, &mut dkb, &known);
    let [c] = found.as_slice() else {
        return Err(format!("expected one definition, got {found:?}"));
    };
    let span = |r: &std::ops::Range<usize>| doc.text[doc.byte_span(r.clone())].to_string();
    Ok((c.order, span(&c.acronym_span), span(&c.expansion_span)))
}

pub fn expansion_then_acronym() -> Result<(), String> {
    let got = definition("The International Primary Aluminium Institute (IPAI) said.")?;
    ensure!(
        got == (
            AcronymOrder::ExpansionFirst,
            "IPAI".into(),
            "International Primary Aluminium Institute".into()
        ),
        "got {got:?}"
    );
    Ok(())
}

pub fn acronym_then_expansion() -> Result<(), String> {
    let got = definition("The AIEA (Agence Internationale de l' Energie Atomique) met.")?;
    ensure!(
        got == (
            AcronymOrder::AcronymFirst,
            "AIEA".into(),
            "Agence Internationale de l' Energie Atomique".into()
        ),
        "got {got:?}"
    );
    Ok(())
}

fn letters(acronym: &str, words: &[&str]) -> bool {
    match_acronym_letters(acronym, words, &DocumentKb::new(&sample().kb))
}

pub fn sbf_skips_des() -> Result<(), String> {
    ensure!(
        letters("SBF", &["Société", "des", "Bourses", "Françaises"]),
        "rejected"
    );
    Ok(())
}

pub fn bdf_keeps_de() -> Result<(), String> {
    ensure!(letters("BDF", &["Banque", "de", "France"]), "rejected");
    Ok(())
}

pub fn credes_long_expansion() -> Result<(), String> {
    let words = [
        "Centre",
        "de",
        "recherche",
        ",",
        "d'",
        "études",
        "et",
        "de",
        "documentation",
        "en",
        "économie",
        "de",
        "la",
        "santé",
    ];
    ensure!(letters("CREDES", &words), "rejected");
    Ok(())
}

pub fn bare_radical_links_to_company() -> Result<(), String> {
    let text = "Kyocera Corp raised its forecast. Analysts said Kyocera would gain.";
    let records = annotator().annotate("t", text);
    let r = record_for(&records, text, "Kyocera", 1).ok_or("no bare Kyocera record")?;
    ensure!(
        r.category == "company" && r.method == Method::RadicalLink,
        "got {} via {:?}",
        r.category,
        r.method
    );
    Ok(())
}

pub fn shared_radical_stays_doubtful() -> Result<(), String> {
    let text = "Mr Mitterand and Mrs Mitterand arrived. Later, Mitterand spoke.";
    let records = annotator().annotate("t", text);
    let r = record_for(&records, text, "Mitterand", 2).ok_or("no bare record")?;
    ensure!(r.category == "unknown", "transferred to {}", r.category);
    ensure!(r.doubtful, "not doubtful");
    Ok(())
}

pub fn hospital_wins_by_form_count() -> Result<(), String> {
    let text =
        "Doctors at the Hôpital Saint Louis went on strike. Patients at Saint Louis were moved.";
    let records = annotator().annotate("t", text);
    for r in records.iter().filter(|r| r.surface.contains("Saint Louis")) {
        ensure!(
            r.reference_id.as_deref() == Some("r:hopital-saint-louis") && !r.doubtful,
            "{} resolved to {:?} doubtful={}",
            r.surface,
            r.reference_id,
            r.doubtful
        );
    }
    let bare = record_for(&records, text, "Saint Louis", 1).ok_or("no bare record")?;
    ensure!(
        bare.category == "organization",
        "bare form is {}",
        bare.category
    );
    Ok(())
}

pub fn isolated_title_falls_back() -> Result<(), String> {
    let records = annotator().annotate("t", "Saint Louis: results up");
    let [r] = records.as_slice() else {
        return Err(format!("expected one record, got {records:?}"));
    };
    ensure!(
        r.reference_id.as_deref() == Some("r:saint-louis-food"),
        "got {:?}",
        r.reference_id
    );
    ensure!(
        r.doubtful && r.method == Method::FrequencyFallback,
        "got {r:?}"
    );
    Ok(())
}

pub fn express_sells_le_point() -> Result<(), String> {
    let text = "Express group intends to sell Le Point for 700 MF.";
    let records = annotator().annotate("t", text);
    let got: Vec<(&str, &str, Option<&str>)> = records
        .iter()
        .map(|r| {
            (
                r.surface.as_str(),
                r.category.as_str(),
                r.reference_id.as_deref(),
            )
        })
        .collect();
    ensure!(
        got == [
            ("Express", "company", Some("r:express")),
            ("Le Point", "company", Some("r:le-point"))
        ],
        "got {got:?}"
    );
    let kb = &sample().kb;
    let le_point = kb.reference(kb.reference_id("r:le-point").unwrap());
    let newspaper = kb.attribute_id("newspaper").unwrap();
    ensure!(
        le_point.attributes.contains(&newspaper),
        "Le Point is not marked as a newspaper"
    );
    Ok(())
}
