//! Random registries checked against a brute-force scan of their JSON.

use std::collections::BTreeSet;

use kql_core::{AddressTuple, FieldRef, Registry, Scope, TagRef};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::Report;

pub const MAX_DIMENSIONS: usize = 20;
pub const MAX_TAGS: usize = 15;
pub const MAX_TABLES: usize = 5;

/// One field as read straight from the JSON document.
#[derive(Debug, Clone)]
struct RawField {
    table: String,
    field: String,
    dimension: Option<String>,
    tags: BTreeSet<String>,
}

/// Registry JSON with at most 20 dimensions, 15 tags and 5 tables.
pub fn random_registry_json(rng: &mut impl Rng) -> Json {
    let n_dims = rng.gen_range(1..=MAX_DIMENSIONS);
    let dims: Vec<String> = (0..n_dims).map(|i| format!("d{i}")).collect();
    let schemes = ["_", "ctx", "org"];
    let n_tags = rng.gen_range(0..=MAX_TAGS);
    let tags: Vec<String> = (0..n_tags).map(|i| format!("{}:t{i}", schemes[i % schemes.len()])).collect();

    let n_sets = rng.gen_range(1..=4);
    let sets: Vec<Json> = (0..n_sets)
        .map(|i| {
            let k = rng.gen_range(1..=dims.len().min(4));
            let members: Vec<&String> = dims.choose_multiple(rng, k).collect();
            json!({ "name": format!("ds{i}"), "dimensions": members })
        })
        .collect();

    let n_tables = rng.gen_range(0..=MAX_TABLES);
    let tables: Vec<Json> = (0..n_tables)
        .map(|t| {
            let n_fields = rng.gen_range(0..=8);
            let fields: Vec<Json> = (0..n_fields)
                .map(|f| {
                    let ty = ["string", "integer", "timestamp"][rng.gen_range(0..3)];
                    let mut field = json!({ "name": format!("f{f}"), "type": ty });
                    if rng.gen_bool(0.8) {
                        // few dimensions per table so that tag choice matters
                        let dim = &dims[rng.gen_range(0..dims.len().min(6))];
                        field["dimension"] = json!(dim);
                        let k = rng.gen_range(0..=tags.len().min(3));
                        let chosen: Vec<&String> = tags.choose_multiple(rng, k).collect();
                        if !chosen.is_empty() || rng.gen_bool(0.5) {
                            field["tags"] = json!(chosen);
                        }
                    }
                    field
                })
                .collect();
            json!({ "name": format!("tbl{t}"), "fields": fields })
        })
        .collect();

    let tag_objs: Vec<Json> = tags
        .iter()
        .map(|t| {
            let (s, n) = t.split_once(':').expect("scheme:name");
            json!({ "scheme": s, "name": n })
        })
        .collect();
    let dim_objs: Vec<Json> = dims.iter().map(|d| json!({ "name": d })).collect();
    json!({ "dimensions": dim_objs, "tags": tag_objs, "dimension_sets": sets, "tables": tables })
}

fn raw_fields(doc: &Json) -> Vec<RawField> {
    let mut out = Vec::new();
    for t in doc["tables"].as_array().expect("tables") {
        for f in t["fields"].as_array().expect("fields") {
            out.push(RawField {
                table: t["name"].as_str().expect("name").to_string(),
                field: f["name"].as_str().expect("name").to_string(),
                dimension: f.get("dimension").and_then(Json::as_str).map(str::to_string),
                tags: f
                    .get("tags")
                    .and_then(Json::as_array)
                    .map(|ts| ts.iter().map(|t| t.as_str().expect("tag").to_string()).collect())
                    .unwrap_or_default(),
            });
        }
    }
    out
}

fn set_dims(doc: &Json, ds: &str) -> BTreeSet<String> {
    doc["dimension_sets"]
        .as_array()
        .expect("sets")
        .iter()
        .find(|s| s["name"] == ds)
        .expect("declared set")["dimensions"]
        .as_array()
        .expect("dims")
        .iter()
        .map(|d| d.as_str().expect("dim").to_string())
        .collect()
}

fn in_scope(scope: &Option<String>, table: &str) -> bool {
    scope.as_deref().is_none_or(|s| s == table)
}

fn brute_fields(fields: &[RawField], scope: &Option<String>, dim: &str, tags: &BTreeSet<String>) -> Vec<FieldRef> {
    fields
        .iter()
        .filter(|f| in_scope(scope, &f.table) && f.dimension.as_deref() == Some(dim) && tags.is_subset(&f.tags))
        .map(|f| FieldRef::new(&f.table, &f.field))
        .collect()
}

fn brute_tables(doc: &Json, fields: &[RawField], ds: &str) -> Vec<String> {
    let want = set_dims(doc, ds);
    doc["tables"]
        .as_array()
        .expect("tables")
        .iter()
        .map(|t| t["name"].as_str().expect("name").to_string())
        .filter(|t| {
            let have: BTreeSet<&str> = fields
                .iter()
                .filter(|f| &f.table == t)
                .filter_map(|f| f.dimension.as_deref())
                .collect();
            want.iter().all(|d| have.contains(d.as_str()))
        })
        .collect()
}

fn brute_expand(doc: &Json, fields: &[RawField], scope: &Option<String>, ds: &str) -> Vec<FieldRef> {
    let want = set_dims(doc, ds);
    fields
        .iter()
        .filter(|f| in_scope(scope, &f.table) && f.dimension.as_ref().is_some_and(|d| want.contains(d)))
        .map(|f| FieldRef::new(&f.table, &f.field))
        .collect()
}

fn to_scope(s: &Option<String>) -> Scope {
    match s {
        None => Scope::All,
        Some(t) => Scope::Table(t.clone()),
    }
}

fn tag_refs(tags: &BTreeSet<String>) -> Vec<TagRef> {
    tags.iter().map(|t| t.parse().expect("valid tag")).collect()
}

fn check_one(doc: &Json, rng: &mut ChaCha8Rng, report: &mut Report, case: usize) {
    let text = doc.to_string();
    let reg = match Registry::from_json(&text) {
        Ok(r) => r,
        Err(e) => {
            report.fail(format!("registry {case}: valid document rejected: {e}"));
            return;
        }
    };
    let fields = raw_fields(doc);
    let dims: Vec<String> = doc["dimensions"].as_array().expect("dims").iter().map(|d| d["name"].as_str().expect("n").to_string()).collect();
    let all_tags: Vec<String> = doc["tags"]
        .as_array()
        .expect("tags")
        .iter()
        .map(|t| format!("{}:{}", t["scheme"].as_str().expect("s"), t["name"].as_str().expect("n")))
        .collect();
    let mut scopes: Vec<Option<String>> = vec![None];
    scopes.extend(doc["tables"].as_array().expect("tables").iter().map(|t| Some(t["name"].as_str().expect("n").to_string())));

    // resolution soundness and completeness
    let mut addresses: Vec<(String, BTreeSet<String>)> = dims.iter().map(|d| (d.clone(), BTreeSet::new())).collect();
    for f in &fields {
        if let Some(d) = &f.dimension {
            // every subset of a bound field's tags must match it
            let tags: Vec<&String> = f.tags.iter().collect();
            let k = rng.gen_range(0..=tags.len());
            addresses.push((d.clone(), tags.choose_multiple(rng, k).map(|t| (*t).clone()).collect()));
            addresses.push((d.clone(), f.tags.clone()));
        }
    }
    for _ in 0..10 {
        let d = dims.choose(rng).expect("dims").clone();
        let k = rng.gen_range(0..=all_tags.len().min(3));
        addresses.push((d, all_tags.choose_multiple(rng, k).cloned().collect()));
    }
    for (dim, tags) in &addresses {
        let scope = scopes.choose(rng).expect("scopes").clone();
        let addr = AddressTuple::new(dim.clone(), tag_refs(tags));
        let got = reg.resolve_fields(&to_scope(&scope), &addr);
        let want = brute_fields(&fields, &scope, dim, tags);
        match got {
            Ok(got) if got == want => {}
            other => report.fail(format!("registry {case}: resolve_fields({scope:?}, {addr}) = {other:?}, brute force {want:?}")),
        }
        for r in reg.resolve_fields(&to_scope(&scope), &addr).unwrap_or_default() {
            let b = reg.binding(&r.table, &r.field).and_then(|b| b.address.as_ref());
            if !b.is_some_and(|a| a.dimension == *dim && addr.tags.is_subset(&a.tags)) {
                report.fail(format!("registry {case}: {r} returned for {addr} but does not satisfy it"));
            }
        }
    }
    if reg.resolve_fields(&Scope::All, &AddressTuple::new("undeclared_dim", [])).map_err(|e| e.code()) != Err("E_REF") {
        report.fail(format!("registry {case}: undeclared dimension not E_REF"));
    }

    // DimensionSet table matching and expansion
    for s in doc["dimension_sets"].as_array().expect("sets") {
        let ds = s["name"].as_str().expect("name");
        let got = reg.resolve_tables(ds).ok();
        let want = brute_tables(doc, &fields, ds);
        if got.as_ref() != Some(&want) {
            report.fail(format!("registry {case}: resolve_tables({ds}) = {got:?}, brute force {want:?}"));
        }
        for scope in &scopes {
            let got = reg.expand_dimension_set(&to_scope(scope), ds).ok();
            let want = brute_expand(doc, &fields, scope, ds);
            if got.as_ref() != Some(&want) {
                report.fail(format!("registry {case}: expand_dimension_set({scope:?}, {ds}) = {got:?}, brute force {want:?}"));
            }
        }
    }

    // canonical round trip
    let canonical = reg.to_json();
    match Registry::from_json(&canonical) {
        Ok(back) if back == reg && back.to_json() == canonical => {}
        Ok(_) => report.fail(format!("registry {case}: round trip changed the registry")),
        Err(e) => report.fail(format!("registry {case}: canonical form rejected: {e}")),
    }

    check_mutations(&reg, &fields, &all_tags, rng, report, case);
}

fn check_mutations(reg: &Registry, fields: &[RawField], all_tags: &[String], rng: &mut ChaCha8Rng, report: &mut Report, case: usize) {
    let before = reg.clone();
    for f in fields {
        let result_code = |r: Result<Registry, kql_core::RegistryError>| r.map(|_| ()).map_err(|e| e.code());
        if f.dimension.is_none() {
            if let Some(t) = all_tags.first() {
                let tag: TagRef = t.parse().expect("tag");
                if result_code(reg.mutate_tags(&f.table, &f.field, &[tag], &[])) != Err("E_UNBOUND") {
                    report.fail(format!("registry {case}: tagging unbound {}.{} not E_UNBOUND", f.table, f.field));
                }
            }
            continue;
        }
        if result_code(reg.mutate_tags(&f.table, &f.field, &["zz:undeclared".parse().expect("tag")], &[])) != Err("E_REF") {
            report.fail(format!("registry {case}: undeclared tag not E_REF"));
        }
        let k_add = rng.gen_range(0..=all_tags.len().min(2));
        let add: BTreeSet<String> = all_tags.choose_multiple(rng, k_add).cloned().collect();
        let k_rm = rng.gen_range(0..=all_tags.len().min(2));
        let remove: BTreeSet<String> = all_tags.choose_multiple(rng, k_rm).cloned().collect();
        let (add_refs, rm_refs) = (tag_refs(&add), tag_refs(&remove));
        let Ok(once) = reg.mutate_tags(&f.table, &f.field, &add_refs, &rm_refs) else {
            report.fail(format!("registry {case}: mutate_tags on {}.{} failed", f.table, f.field));
            continue;
        };
        let expected: BTreeSet<String> = f.tags.union(&add).filter(|t| !remove.contains(*t)).cloned().collect();
        let got: BTreeSet<String> = once
            .binding(&f.table, &f.field)
            .and_then(|b| b.address.as_ref())
            .map(|a| a.tags.iter().map(|t| t.to_string()).collect())
            .unwrap_or_default();
        if got != expected {
            report.fail(format!("registry {case}: mutate_tags({}.{}) tags {got:?}, expected {expected:?}", f.table, f.field));
        }
        match once.mutate_tags(&f.table, &f.field, &add_refs, &rm_refs) {
            Ok(twice) if twice == once => {}
            _ => report.fail(format!("registry {case}: mutate_tags not idempotent on {}.{}", f.table, f.field)),
        }
        if let Some(absent) = all_tags.iter().find(|t| !f.tags.contains(*t)) {
            let t = tag_refs(&BTreeSet::from([absent.clone()]));
            let restored = reg
                .mutate_tags(&f.table, &f.field, &t, &[])
                .and_then(|r| r.mutate_tags(&f.table, &f.field, &[], &t));
            if restored.as_ref().ok() != Some(reg) {
                report.fail(format!("registry {case}: add-then-remove of {absent} did not restore {}.{}", f.table, f.field));
            }
        }
    }
    if *reg != before {
        report.fail(format!("registry {case}: mutate_tags changed the original registry"));
    }
}

/// Checks `n` random registries.
pub fn suite(n: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();
    for case in 0..n {
        let doc = random_registry_json(&mut rng);
        check_one(&doc, &mut rng, &mut report, case);
        report.cases += 1;
    }
    report
}
