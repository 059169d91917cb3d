//! End-to-end acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line each, and exits nonzero if any failed.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use eid_cli::commands::{cmd_issue, cmd_revoke};
use eid_cli::config::Config;
use eid_cli::scenario::run_scenario;
use eid_core::audit::find_biometric;
use eid_core::authority::{BreederDocument, BreederDocumentKind, IssuingAuthority, VettingDossier};
use eid_core::biometrics::{
    align_at_rotation, angle_diff, candidate_rotation, capture_template, evaluate_rates_with, match_templates,
    synthesize_finger, FingerprintTemplate, MatchConfig, Minutia, RatesConfig, SensorModel,
};
use eid_core::card::{Card, CardCommand, CardResponse, SubjectIdentity};
use eid_core::pki::{
    canonical_encode_body, canonical_encode_crl, generate_keypair, seal_to_public, CertificateBody, CrlBody,
    IdentityCertificate, ImageDigest, KeyPair, PublicKey, RevocationEntry, RevocationList, RevocationReason,
};
use eid_core::verifier::{Step, StepState, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn cfg(seed: u64) -> Config {
    Config { seed: Some(seed), ..Default::default() }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario_over_seeds(name: &str, seeds: std::ops::Range<u64>, expect: Verdict) -> Result<(usize, Duration), String> {
    let t0 = Instant::now();
    let mut ok = 0;
    for s in seeds.clone() {
        let t = run_scenario(&cfg(s), name).map_err(|e| format!("seed {s}: {e}"))?;
        let last = t.reports.last().ok_or("no report")?;
        ensure(t.verdict == expect && t.passed, || format!("seed {s}: verdict {:?}", t.verdict))?;
        if expect != Verdict::Accept {
            // the failing step is the only one marked failed, nothing runs after it
            let Verdict::Reject { step } = expect else { unreachable!() };
            let i = Step::ORDER.iter().position(|x| *x == step).unwrap();
            let states = last.states();
            ensure(states[..i].iter().all(|x| *x == StepState::Passed), || format!("seed {s}: {states:?}"))?;
            ensure(states[i + 1..].iter().all(|x| *x == StepState::NotExecuted), || format!("seed {s}: {states:?}"))?;
        }
        ok += 1;
    }
    Ok((ok, t0.elapsed()))
}

// 1
fn happy_path() -> Outcome {
    let t0 = Instant::now();
    for s in 0..50 {
        let t = run_scenario(&cfg(s), "genuine").map_err(|e| e.to_string())?;
        let r = &t.reports[0];
        ensure(r.states() == [StepState::Passed; 6] && r.is_accept(), || format!("seed {s}: {:?}", r.states()))?;
    }
    let el = t0.elapsed();
    ensure(el < Duration::from_secs(10), || format!("50 runs took {el:?}"))?;
    Ok(format!("50/50 accepted with six steps passed in {:.2}s", el.as_secs_f64()))
}

// 2
fn clone_resistance() -> Outcome {
    let (n, el) = scenario_over_seeds("clone", 0..50, Verdict::Reject { step: Step::ChallengeResponse })?;
    Ok(format!("{n}/50 rejected at challenge_response ({:.2}s)", el.as_secs_f64()))
}

// 3
fn revocation_and_expiry() -> Outcome {
    let (r, _) = scenario_over_seeds("revoked", 0..50, Verdict::Reject { step: Step::RevocationCheck })?;
    let (e, _) = scenario_over_seeds("expired", 0..50, Verdict::Reject { step: Step::ValidityWindow })?;
    Ok(format!("revoked {r}/50 at revocation_check, expired {e}/50 at validity_window"))
}

// 4
const FACE: &[u8] = b"face";

struct Fixture {
    enrolled: FingerprintTemplate,
    genuine: FingerprintTemplate,
    impostor: FingerprintTemplate,
    ca: KeyPair,
}

fn fixture(seed: u64) -> Fixture {
    let (c, s) = (MatchConfig::default(), SensorModel::default());
    let truth = synthesize_finger(seed, 30).unwrap();
    let other = synthesize_finger(seed + 777, 30).unwrap();
    Fixture {
        enrolled: capture_template(&truth, &s, &c, 1).unwrap(),
        genuine: capture_template(&truth, &s, &c, 2).unwrap(),
        impostor: capture_template(&other, &s, &c, 3).unwrap(),
        ca: generate_keypair(&[0xca; 32]).unwrap(),
    }
}

fn cert_for(ca: &KeyPair, key: &PublicKey, exempt: bool) -> IdentityCertificate {
    let body = CertificateBody {
        version: 1,
        serial: 1,
        issuer_id: "EID".into(),
        subject_name: "S".into(),
        national_id: "1".into(),
        birthdate: "1980-01-01".into(),
        facial_image_digest: ImageDigest::of(FACE),
        subject_public_key: key.clone(),
        valid_from: 1,
        valid_to: 2,
        biometric_exempt: exempt,
    };
    IdentityCertificate::sign(body, ca).unwrap()
}

const ENTROPY: [u8; 32] = [0x5a; 32];
const EXEMPT_ENTROPY: [u8; 32] = [0x3c; 32];

/// Card states reachable through the command surface, with names.
fn card_states(f: &Fixture) -> Vec<(&'static str, Card)> {
    let mut out = vec![("blank", Card::default())];
    let mut c = Card::default();
    c.initialize(&f.enrolled, FACE, &ENTROPY).unwrap();
    out.push(("active", c.clone()));
    let mut u = c.clone();
    u.verify_holder(&f.genuine).unwrap();
    out.push(("active-unlocked", u.clone()));
    u.store_certificate(&cert_for(&f.ca, &c.public_key().unwrap(), false)).unwrap();
    out.push(("personalized-unlocked", u.clone()));
    u.end_session();
    out.push(("personalized", u.clone()));
    let mut one = u.clone();
    one.verify_holder(&f.impostor).unwrap();
    out.push(("one-failure", one));
    let mut lo = u;
    while !lo.is_locked_out() {
        lo.verify_holder(&f.impostor).unwrap();
    }
    out.push(("locked-out", lo));
    let mut e = Card::default();
    let pk = e.initialize_exempt(FACE, &EXEMPT_ENTROPY).unwrap();
    out.push(("exempt-active", e.clone()));
    e.unlock_exempt().unwrap();
    out.push(("exempt-active-unlocked", e.clone()));
    e.store_certificate(&cert_for(&f.ca, &pk, true)).unwrap();
    out.push(("exempt-personalized-unlocked", e.clone()));
    e.end_session();
    out.push(("exempt-personalized", e));
    out
}

fn commands(f: &Fixture, key: &PublicKey) -> Vec<CardCommand> {
    vec![
        CardCommand::Initialize { template: f.enrolled.clone(), facial_image: FACE.to_vec(), entropy: [9; 32] },
        CardCommand::InitializeExempt { facial_image: FACE.to_vec(), entropy: [8; 32] },
        CardCommand::PublicKey,
        CardCommand::CreateRequest(SubjectIdentity {
            subject_name: "S".into(),
            national_id: "1".into(),
            birthdate: "1980-01-01".into(),
        }),
        CardCommand::StoreCertificate(cert_for(&f.ca, key, false)),
        CardCommand::StoreCertificate(cert_for(&f.ca, key, true)),
        CardCommand::VerifyHolder(f.genuine.clone()),
        CardCommand::VerifyHolder(f.impostor.clone()),
        CardCommand::UnlockExempt,
        CardCommand::ReadCertificate,
        CardCommand::SignChallenge(vec![0x42; 32]),
        CardCommand::SignChallenge(vec![0x42; 8]),
        CardCommand::Decrypt(seal_to_public(key, b"payload").unwrap()),
        CardCommand::Decrypt(vec![0; 10]),
        CardCommand::EndSession,
    ]
}

fn leaks(resp: &CardResponse, template: &[Minutia], seeds: &[[u8; 32]]) -> Option<String> {
    let json = serde_json::to_string(resp).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    if let Some(hit) = find_biometric(&value) {
        return Some(format!("biometric field {hit}"));
    }
    for s in seeds {
        if json.contains(&hex::encode(s)) || json.as_bytes().windows(32).any(|w| w == s) {
            return Some("private key seed".into());
        }
    }
    for m in template {
        for v in [m.x, m.y, m.angle] {
            let needle = serde_json::to_string(&v).unwrap();
            if needle.len() > 6 && json.contains(&needle) {
                return Some(format!("minutia value {needle}"));
            }
        }
    }
    None
}

fn privacy_surface() -> Outcome {
    let f = fixture(11);
    let mut paths = 0;
    for (name, state) in card_states(&f) {
        let key = state.public_key().unwrap_or_else(|_| generate_keypair(&[1; 32]).unwrap().public_part);
        for cmd in commands(&f, &key) {
            // the command itself, then every command from the resulting state
            let mut first = state.clone();
            let r = first.execute(&cmd);
            paths += 1;
            if let Ok(resp) = &r {
                if let Some(what) = leaks(resp, &f.enrolled.minutiae, &[ENTROPY, EXEMPT_ENTROPY, [9; 32], [8; 32]]) {
                    return Err(format!("{name} / {cmd:?}: {what}"));
                }
            }
            for follow in commands(&f, &key) {
                let mut c = first.clone();
                paths += 1;
                if let Ok(resp) = c.execute(&follow) {
                    if let Some(what) =
                        leaks(&resp, &f.enrolled.minutiae, &[ENTROPY, EXEMPT_ENTROPY, [9; 32], [8; 32]])
                    {
                        return Err(format!("{name} / {cmd:?} / {follow:?}: {what}"));
                    }
                }
            }
        }
    }

    // ledger, trust store and inspection reports
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let c = operator_cfg(dir.path(), 21);
    for (i, id) in ["100", "200", "300"].iter().enumerate() {
        cmd_issue(&c, &dir.path().join(format!("{id}.card")), &dossier(id, 2, "1980-02-02"), NOW + i as u64)
            .map_err(|e| e.to_string())?;
    }
    cmd_revoke(&c, 2, RevocationReason::IllicitUse, NOW + 10).map_err(|e| e.to_string())?;
    let mut scanned = 0;
    let ledger = std::fs::read_to_string(&c.paths.ledger).unwrap();
    for line in ledger.lines().chain([std::fs::read_to_string(&c.paths.trust_store).unwrap().as_str()]) {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        if let Some(hit) = find_biometric(&v) {
            return Err(format!("ledger/trust store field {hit}"));
        }
        scanned += 1;
    }
    for name in eid_cli::SCENARIOS {
        let t = run_scenario(&cfg(5), name).map_err(|e| e.to_string())?;
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        if let Some(hit) = find_biometric(&v) {
            return Err(format!("scenario {name} transcript field {hit}"));
        }
        scanned += t.reports.len();
    }
    Ok(format!("{paths} command paths over 11 states and {scanned} ledger/report documents: no template or key material"))
}

// 5
fn one_time_enrollment() -> Outcome {
    let f = fixture(12);
    let small = synthesize_finger(3, 5).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut commands_run = 0;
    for seq in 0..1000 {
        let mut card = Card::default();
        let mut inits = 0;
        let mut prev = card.lifecycle();
        for _ in 0..rng.random_range(1..=30) {
            let key = card.public_key().unwrap_or_else(|_| generate_keypair(&[1; 32]).unwrap().public_part);
            let cmd = match rng.random_range(0..12) {
                0 => CardCommand::Initialize { template: f.enrolled.clone(), facial_image: FACE.to_vec(), entropy: rng.random() },
                1 => CardCommand::Initialize { template: small.clone(), facial_image: FACE.to_vec(), entropy: rng.random() },
                2 => CardCommand::InitializeExempt { facial_image: FACE.to_vec(), entropy: rng.random() },
                3 => CardCommand::VerifyHolder(f.genuine.clone()),
                4 => CardCommand::VerifyHolder(f.impostor.clone()),
                5 => CardCommand::StoreCertificate(cert_for(&f.ca, &key, rng.random_bool(0.5))),
                6 => CardCommand::StoreCertificate(cert_for(&f.ca, &generate_keypair(&[2; 32]).unwrap().public_part, false)),
                7 => CardCommand::UnlockExempt,
                8 => CardCommand::ReadCertificate,
                9 => CardCommand::SignChallenge(vec![1; 32]),
                10 => CardCommand::EndSession,
                _ => CardCommand::PublicKey,
            };
            let ok = card.execute(&cmd).is_ok();
            commands_run += 1;
            if ok && matches!(cmd, CardCommand::Initialize { .. } | CardCommand::InitializeExempt { .. }) {
                inits += 1;
            }
            ensure(inits <= 1, || format!("sequence {seq}: second successful initialize"))?;
            ensure(card.lifecycle() >= prev, || format!("sequence {seq}: {prev:?} -> {:?}", card.lifecycle()))?;
            prev = card.lifecycle();
        }
    }
    Ok(format!("1000 sequences, {commands_run} commands: at most one initialize, lifecycle monotone"))
}

// 6
fn eligible(r: &Minutia, p: &Minutia, c: &MatchConfig) -> bool {
    r.kind == p.kind && angle_diff(r.angle, p.angle) <= c.angle_tol && (r.x - p.x).hypot(r.y - p.y) <= c.distance_tol
}

/// Maximum-cardinality pairing by trying every injective assignment.
fn brute_force(reference: &[Minutia], probe: &[Minutia], c: &MatchConfig) -> usize {
    fn go(i: usize, r: &[Minutia], p: &[Minutia], used: &mut Vec<bool>, c: &MatchConfig) -> usize {
        if i == r.len() {
            return 0;
        }
        let mut best = go(i + 1, r, p, used, c);
        for j in 0..p.len() {
            if !used[j] && eligible(&r[i], &p[j], c) {
                used[j] = true;
                best = best.max(1 + go(i + 1, r, p, used, c));
                used[j] = false;
            }
        }
        best
    }
    go(0, reference, probe, &mut vec![false; probe.len()], c)
}

fn matcher_oracle() -> Outcome {
    let c = MatchConfig::default();
    let sensor = SensorModel { spurious_rate: 0.0, jitter_sigma: 0.012, dropout_prob: 0.1, ..SensorModel::default() };
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let (mut equal, mut nontrivial) = (0, 0);
    for case in 0..100u64 {
        let n = rng.random_range(3..=6);
        let truth = synthesize_finger(1000 + case, n).unwrap();
        let reference = capture_template(&truth, &sensor, &c, 2 * case).unwrap();
        // every fourth case pairs unrelated fingers
        let probe_truth = if case % 4 == 3 { synthesize_finger(5000 + case, n).unwrap() } else { truth };
        let probe = capture_template(&probe_truth, &sensor, &c, 2 * case + 1).unwrap();
        ensure(reference.len() <= 6 && probe.len() <= 6, || format!("case {case}: oversize"))?;
        let res = match_templates(&reference, &probe, &c);
        let k = (0..c.rotation_candidates).find(|&k| candidate_rotation(k, &c) == res.aligned_rotation).unwrap();
        let (aligned, pairs) = align_at_rotation(&reference.minutiae, &probe.minutiae, candidate_rotation(k, &c), &c);
        ensure(pairs.len() == res.matched_pairs, || format!("case {case}: alignment mismatch"))?;
        let optimum = brute_force(&reference.minutiae, &aligned, &c);
        ensure(res.matched_pairs <= optimum, || format!("case {case}: greedy {} > optimum {optimum}", res.matched_pairs))?;
        if res.matched_pairs == optimum {
            equal += 1;
        }
        if optimum > 0 {
            nontrivial += 1;
        }
    }
    ensure(equal >= 95, || format!("greedy optimal on only {equal}/100"))?;
    Ok(format!("greedy <= optimum on 100/100, equal on {equal}/100 ({nontrivial} with pairs)"))
}

// 7
fn rates_behaviour() -> Outcome {
    let t0 = Instant::now();
    let thresholds: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let rc = RatesConfig { minutiae_range: (20, 40), ..Default::default() };
    let report = evaluate_rates_with(50, &SensorModel::default(), &thresholds, 10, 7, &rc).map_err(|e| e.to_string())?;
    for w in report.rows.windows(2) {
        ensure(w[1].frr >= w[0].frr, || format!("FRR fell: {:?} -> {:?}", w[0], w[1]))?;
        ensure(w[1].far <= w[0].far, || format!("FAR rose: {:?} -> {:?}", w[0], w[1]))?;
        ensure(w[0].genuine_trials == w[1].genuine_trials && w[0].impostor_trials == w[1].impostor_trials, || {
            "trial sets differ between thresholds".into()
        })?;
    }
    ensure(report.rows.iter().all(|r| r.fer == 0.0), || "FER > 0 with floor 20".into())?;
    // floor exactly at the enrollment minimum, no dropout
    let floor = MatchConfig::default().min_enroll_minutiae as usize;
    let rc12 = RatesConfig { minutiae_range: (floor, 40), impostor_budget: 100, ..Default::default() };
    let no_drop = SensorModel { dropout_prob: 0.0, ..SensorModel::default() };
    let r12 = evaluate_rates_with(50, &no_drop, &[0.4], 1, 8, &rc12).map_err(|e| e.to_string())?;
    ensure(r12.rows[0].fer == 0.0, || format!("FER {} with floor {floor}", r12.rows[0].fer))?;
    let el = t0.elapsed();
    ensure(el < Duration::from_secs(60), || format!("took {el:?}"))?;
    let row = |t: f64| report.rows.iter().find(|r| (r.threshold - t).abs() < 1e-9).unwrap();
    Ok(format!(
        "monotone over 10 thresholds, FER 0, at 0.4 FRR {:.3} FAR {:.4} ({} genuine, {} impostor) in {:.2}s",
        row(0.4).frr,
        row(0.4).far,
        report.rows[0].genuine_trials,
        report.rows[0].impostor_trials,
        el.as_secs_f64()
    ))
}

// 8
fn separation() -> Outcome {
    let (c, s) = (MatchConfig::default(), SensorModel::default());
    let fingers: Vec<_> = (0..100u64).map(|i| synthesize_finger(90_000 + i, 30).unwrap()).collect();
    let refs: Vec<_> = fingers.iter().enumerate().map(|(i, f)| capture_template(f, &s, &c, 10 * i as u64).unwrap()).collect();
    let probes: Vec<_> =
        fingers.iter().enumerate().map(|(i, f)| capture_template(f, &s, &c, 10 * i as u64 + 1).unwrap()).collect();
    let (mut g_min, mut i_max) = (f64::MAX, 0.0f64);
    for i in 0..100 {
        let g = match_templates(&refs[i], &probes[i], &c);
        let imp = match_templates(&refs[i], &probes[(i + 1) % 100], &c);
        g_min = g_min.min(g.score);
        i_max = i_max.max(imp.score);
        ensure(g.decision, || format!("genuine {i} rejected at {:.3}", g.score))?;
        ensure(!imp.decision, || format!("impostor {i} accepted at {:.3}", imp.score))?;
    }
    Ok(format!("100/100 genuine accepted (min {g_min:.3}), 100/100 impostors rejected (max {i_max:.3})"))
}

// 9
const NOW: u64 = 1_717_200_000;

fn operator_cfg(dir: &Path, seed: u64) -> Config {
    let mut c = cfg(seed);
    c.paths.ledger = dir.join("ledger.jsonl");
    c.paths.trust_store = dir.join("trust.json");
    c
}

fn dossier(id: &str, verified: usize, birthdate: &str) -> VettingDossier {
    VettingDossier {
        subject_name: format!("Subject {id}"),
        national_id: id.into(),
        birthdate: birthdate.into(),
        documents: (0..3)
            .map(|i| BreederDocument { kind: BreederDocumentKind::BirthCertificate, verified: i < verified })
            .collect(),
        facial_image: id.as_bytes().to_vec(),
    }
}

fn determinism() -> Outcome {
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let mut runs = 0;
    for name in eid_cli::SCENARIOS {
        for seed in [1u64, 99] {
            let a = run_scenario(&cfg(seed), name).map_err(|e| e.to_string())?.to_json();
            let b = pool(1).install(|| run_scenario(&cfg(seed), name)).map_err(|e| e.to_string())?.to_json();
            let c = pool(4).install(|| run_scenario(&cfg(seed), name)).map_err(|e| e.to_string())?.to_json();
            ensure(a == b && b == c, || format!("{name} seed {seed}: transcripts differ"))?;
            runs += 3;
        }
    }
    let rc = RatesConfig { impostor_budget: 300, ..Default::default() };
    let rates = |n| pool(n).install(|| evaluate_rates_with(20, &SensorModel::default(), &[0.3, 0.4], 3, 4, &rc).unwrap().to_csv());
    ensure(rates(1) == rates(4), || "rates CSV depends on thread count".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let c = operator_cfg(dir.path(), 31);
    for (i, id) in ["11", "22", "33", "44"].iter().enumerate() {
        cmd_issue(&c, &dir.path().join(format!("{id}.card")), &dossier(id, 2, "1975-05-05"), NOW + i as u64)
            .map_err(|e| e.to_string())?;
    }
    cmd_revoke(&c, 3, RevocationReason::KeyCompromise, NOW + 50).map_err(|e| e.to_string())?;
    let first = std::fs::read(&c.paths.ledger).unwrap();
    let ca = eid_cli::world::ca_keys(&c);
    let loaded = IssuingAuthority::load(&c.paths.ledger, &c.authority_id, ca, c.policy).map_err(|e| e.to_string())?;
    let again: PathBuf = dir.path().join("again.jsonl");
    loaded.save(&again).map_err(|e| e.to_string())?;
    ensure(first == std::fs::read(&again).unwrap(), || "ledger save/load/save differs".into())?;
    Ok(format!("{runs} scenario runs byte-identical across 1/4 threads; rates CSV stable; ledger round trip identical"))
}

// 10
fn encoding_stability() -> Outcome {
    let golden = |n: &str| {
        let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(n);
        std::fs::read_to_string(&p).map(|s| s.trim().to_string()).map_err(|e| format!("{}: {e}", p.display()))
    };
    let body = CertificateBody {
        version: 1,
        serial: 42,
        issuer_id: "EID".into(),
        subject_name: "Maria Ionescu".into(),
        national_id: "7001015550011".into(),
        birthdate: "1970-01-01".into(),
        facial_image_digest: ImageDigest::of(b"portrait"),
        subject_public_key: generate_keypair(&[0x11; 32]).unwrap().public_part,
        valid_from: 1_717_200_000,
        valid_to: 1_874_966_400,
        biometric_exempt: false,
    };
    let crl = CrlBody {
        issuer_id: "EID".into(),
        sequence: 3,
        issued_at: 1_717_300_000,
        entries: vec![
            RevocationEntry { serial: 7, reason: RevocationReason::KeyCompromise, revoked_at: 1_717_250_000 },
            RevocationEntry { serial: 42, reason: RevocationReason::IllicitUse, revoked_at: 1_717_260_000 },
        ],
    };
    let ca = generate_keypair(&[0xca; 32]).unwrap();
    let cert_bytes = canonical_encode_body(&body).unwrap();
    let crl_bytes = canonical_encode_crl(&crl).unwrap();
    ensure(hex::encode(&cert_bytes) == golden("certificate_body.hex")?, || "certificate body drifted".into())?;
    ensure(hex::encode(&crl_bytes) == golden("crl_body.hex")?, || "CRL body drifted".into())?;
    let cert_sig = IdentityCertificate::sign(body, &ca).unwrap().signature;
    let crl_sig = RevocationList::sign(crl, &ca).unwrap().signature;
    ensure(hex::encode(cert_sig.as_bytes()) == golden("certificate_signature.hex")?, || "certificate signature drifted".into())?;
    ensure(hex::encode(crl_sig.as_bytes()) == golden("crl_signature.hex")?, || "CRL signature drifted".into())?;
    Ok(format!("certificate ({} B) and CRL ({} B) encodings and signatures match pinned bytes", cert_bytes.len(), crl_bytes.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("happy path", happy_path),
        ("clone resistance", clone_resistance),
        ("revocation and expiry", revocation_and_expiry),
        ("privacy surface", privacy_surface),
        ("one-time enrollment", one_time_enrollment),
        ("matcher oracle", matcher_oracle),
        ("rates behaviour", rates_behaviour),
        ("separation at defaults", separation),
        ("determinism", determinism),
        ("encoding stability", encoding_stability),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let el = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} [{el:.2}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} [{el:.2}s]: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
