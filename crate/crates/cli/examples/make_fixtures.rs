//! Regenerate the JSON fixture corpus: `cargo run -p frobmod-cli --example make_fixtures`.

use std::path::Path;

use frobmod::frobenius::FrobeniusLift;
use frobmod::gen::Gen;
use frobmod::json::{ModuleWire, SeriesWire};
use frobmod::linalg::{q, QMatrix};
use frobmod::monodromy::{PhiNModule, PhiNWire};
use frobmod::padic::{PAdicScalar, Precision};
use frobmod::phinabla::{solve_log_frobenius, BaseRing, LogPhiNablaModule, PhiNablaModule};
use frobmod::pi1::{degree_two_monodromy_example, standard_pairs, surface_names, LieWire, NilpotentLieData};
use frobmod::series::{RingTag, TruncatedSeries};
use frobmod::smatrix::SeriesMatrix;
use serde::Serialize;

fn write<T: Serialize>(dir: &Path, name: &str, value: &T) {
    let mut s = serde_json::to_string_pretty(value).unwrap();
    s.push('\n');
    std::fs::write(dir.join(name), s).unwrap();
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let mut g = Gen::new(20240611);

    // modules
    let m = g.sk_module(3, 2, 8).unwrap();
    write(&dir, "sk_module.json", &ModuleWire::from(&m));
    write(&dir, "sk_module_log.json", &ModuleWire::from(&m.to_log().unwrap()));
    let m = g.edagger_module(5, 2, 8).unwrap();
    write(&dir, "edagger_module.json", &ModuleWire::from(&m));
    let f = FrobeniusLift::standard(3, 3, 12).unwrap();
    write(&dir, "trivial_module.json", &ModuleWire::from(&PhiNablaModule::trivial(&f, BaseRing::EDagger, 1, 10)));

    // A(t) = 1 + t is not horizontal for G = 0
    let g0 = SeriesMatrix::zero(3, RingTag::Plus, 1, 1, 0, 8);
    let a = SeriesMatrix::new(1, 1, vec![TruncatedSeries::from_ints(3, RingTag::Plus, 0, &[1, 1], 8).unwrap()]).unwrap();
    write(&dir, "broken_module.json", &ModuleWire::from(&PhiNablaModule::new(BaseRing::SK, g0, a, f.clone()).unwrap()));

    // G_log = [[0, 1], [0, 0]]
    let glog = SeriesMatrix::constant(3, RingTag::Plus, &QMatrix::from_i64(&[&[0, 1], &[0, 0]]), 8);
    let a = solve_log_frobenius(&glog, &QMatrix::from_i64(&[&[1, 0], &[0, 3]]), &f, 8).unwrap();
    write(&dir, "glog_nilpotent.json", &ModuleWire::from(&LogPhiNablaModule::new(glog, a, f.clone()).unwrap()));
    write(&dir, "log_module_random.json", &ModuleWire::from(&g.log_module(2, 3, 6, true).unwrap()));

    // G known only to t^2: cohomology on a larger window must refuse
    let gshort = SeriesMatrix::new(1, 1, vec![TruncatedSeries::from_ints(5, RingTag::Laurent, 0, &[0, 1], 2).unwrap()]).unwrap();
    let f5 = FrobeniusLift::standard(5, 5, 12).unwrap();
    let a = frobmod::phinabla::solve_frobenius(&gshort, &QMatrix::identity(1), &f5, 3).unwrap();
    write(&dir, "short_module.json", &ModuleWire::from(&PhiNablaModule::new(BaseRing::EDagger, gshort, a, f5).unwrap()));

    // finite data
    #[derive(Serialize)]
    struct Finite {
        #[serde(rename = "Phi0")]
        phi0: Vec<Vec<frobmod::json::Rational>>,
        #[serde(rename = "Phi1")]
        phi1: Vec<Vec<frobmod::json::Rational>>,
    }
    let w = frobmod::json::matrix_to_wire;
    write(
        &dir,
        "finite_phi.json",
        &Finite { phi0: w(&QMatrix::identity(1)), phi1: w(&QMatrix::from_i64(&[&[1, 0, 0], &[0, 3, 1], &[0, 0, 1]])) },
    );

    // (Phi, N) data
    let trivial_h1 = PhiNModule::new(3, QMatrix::diagonal(&[q(1), q(3)]), QMatrix::zeros(2, 2)).unwrap();
    write(&dir, "h1_trivial_n.json", &PhiNWire::from(&trivial_h1));
    let tate = PhiNModule::new(3, QMatrix::diagonal(&[q(1), q(3)]), QMatrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap();
    write(&dir, "h1_tate.json", &PhiNWire::from(&tate));

    // Lie data
    write(&dir, "lie_degree_two.json", &LieWire::from(&degree_two_monodromy_example(3).unwrap()));
    let h1 = PhiNModule::new(5, QMatrix::diagonal(&[q(1), q(1), q(5), q(5)]), QMatrix::zeros(4, 4)).unwrap();
    let surface =
        NilpotentLieData::free_nilpotent_named(&h1, 3, &surface_names(2)).unwrap().impose_surface_relation(&standard_pairs(2)).unwrap();
    write(&dir, "lie_surface_g2.json", &LieWire::from(&surface));

    // a series with mixed precision
    let s = TruncatedSeries::from_terms(
        2,
        RingTag::Laurent,
        -3,
        7,
        vec![(-3, PAdicScalar::from_ratio(2, 1, 3)), (1, PAdicScalar::new(2, q(5), Precision::Abs(6))), (6, PAdicScalar::from_int(2, -4))],
    )
    .unwrap();
    write(&dir, "series.json", &SeriesWire::from(&s));

    std::fs::write(dir.join("malformed.json"), "{\"rank\": 1, \"ring\": \"S_K\",\n  \"frob\": {\"q\": 3,,}\n}\n").unwrap();
}
