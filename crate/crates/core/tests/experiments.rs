use phasegraph::experiments::table::{read_csv, read_jsonl, write_csv, write_jsonl};
use phasegraph::experiments::{
    aligned_rel_err, emit, phase_transition, read_table, sparse_experiment, ExperimentGrid, NoiseRow,
    PhaseTransitionRow, SparseConfig, TableFormat,
};
use phasegraph::experiments::align::{transform, Mirror};
use phasegraph::model::rng::{gaussian_vector, rng_from_seed};
use phasegraph::model::FieldKind;
use phasegraph::solvers::Algorithm;

fn small_grid() -> ExperimentGrid {
    let mut g = ExperimentGrid::new(8, vec![1.0, 3.0], FieldKind::Real);
    g.trials = 4;
    g.max_iters = 400;
    g.algorithms = vec![Algorithm::Gps, Algorithm::Rgps, Algorithm::Dr, Algorithm::Rdr];
    g
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let g = small_grid();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| phase_transition(&g).unwrap());
    let b = four.install(|| phase_transition(&g).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.len(), 8);
    assert!(a.iter().all(|r| r.trials == 4));
}

#[test]
fn a_single_cell_reproduces_its_slice_of_the_grid() {
    let g = small_grid();
    let full = phase_transition(&g).unwrap();
    let mut one = g.clone();
    one.m_ratios = vec![3.0];
    one.algorithms = vec![Algorithm::Rgps];
    let cell = phase_transition(&one).unwrap();
    let matching = full.iter().find(|r| r.ratio == 3.0 && r.algorithm == Algorithm::Rgps).unwrap();
    assert_eq!(&cell[0], matching);
}

#[test]
fn tables_roundtrip_in_both_formats() {
    let rows = phase_transition(&small_grid()).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).unwrap();
    assert_eq!(read_csv::<PhaseTransitionRow, _>(buf.as_slice()).unwrap(), rows);
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &rows).unwrap();
    assert_eq!(buf.iter().filter(|&&c| c == b'\n').count(), rows.len());
    assert_eq!(read_jsonl::<PhaseTransitionRow, _>(buf.as_slice()).unwrap(), rows);

    let dir = tempfile::tempdir().unwrap();
    for name in ["t.csv", "t.jsonl"] {
        let path = dir.path().join(name);
        emit(&rows, &path, TableFormat::from_path(&path)).unwrap();
        assert_eq!(read_table::<PhaseTransitionRow>(&path, TableFormat::from_path(&path)).unwrap(), rows);
    }
}

#[test]
fn empty_table_is_header_only_and_infinities_survive() {
    let mut buf = Vec::new();
    write_csv::<NoiseRow, _>(&mut buf, &[]).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "field,algorithm,n,m,snr_db,median_rel_err_db\n");
    let row = NoiseRow {
        field: FieldKind::Complex,
        algorithm: Algorithm::Rgps,
        n: 4,
        m: 12,
        snr_db: f64::INFINITY,
        median_rel_err_db: f64::NEG_INFINITY,
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, std::slice::from_ref(&row)).unwrap();
    assert_eq!(read_csv::<NoiseRow, _>(buf.as_slice()).unwrap(), vec![row.clone()]);
    let mut buf = Vec::new();
    write_jsonl(&mut buf, std::slice::from_ref(&row)).unwrap();
    assert_eq!(read_jsonl::<NoiseRow, _>(buf.as_slice()).unwrap(), vec![row]);
}

#[test]
fn alignment_undoes_shifts_and_reflections() {
    let (gh, gw) = (6, 5);
    let truth = gaussian_vector(&mut rng_from_seed(3), gh * gw, FieldKind::Real);
    for mirror in Mirror::ALL {
        for (dr, dc) in [(0, 0), (2, 3), (5, 4)] {
            let moved = transform(&truth, gh, gw, mirror, dr, dc);
            assert!(aligned_rel_err(&moved, &truth, gh, gw).unwrap() < 1e-14);
        }
    }
    let other = gaussian_vector(&mut rng_from_seed(4), gh * gw, FieldKind::Real);
    assert!(aligned_rel_err(&other, &truth, gh, gw).unwrap() > 0.1);
}

#[test]
fn sparse_cells_count_every_trial() {
    let mut c = SparseConfig::new(20, vec![0, 2]);
    c.trials = 3;
    c.max_iters = 300;
    let rows = sparse_experiment(&c).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.rate >= 0.0 && r.rate <= 1.0));
    assert_eq!(rows[0].rate, 1.0);
}
