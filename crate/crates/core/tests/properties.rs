mod common;

use common::*;
use pbwt_batch::divergence::{sweep_with_divergence, DivergenceWorkspace};
use pbwt_batch::format::{read_batch, read_index, write_batch, write_index};
use pbwt_batch::prefix::sweep;
use pbwt_batch::report::{accumulate, flush, flush_endpoints};
use pbwt_batch::smem::{collect_records, find_smems_oracle};
use pbwt_batch::{
    build_full_arrays, build_index, parse_panel, BatchPolicy, EndpointRequest, PrefixListWorkspace,
    QuerySet,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn columns_are_panel_symbols_in_prefix_order(panel in panel_strategy(24, 40)) {
        let index = build_index(&panel);
        let mut runs = 0u64;
        for j in 0..panel.length() {
            let a = brute_prefix_array(&panel, j);
            let want: Vec<u8> = a.iter().map(|&id| panel.get(id as usize, j)).collect();
            prop_assert_eq!(index.decode_column(j).unwrap(), want);
            let mut end = 0usize;
            for (k, run) in index.columns()[j].runs.iter().enumerate() {
                end += run.length as usize;
                prop_assert!(run.length > 0);
                prop_assert_eq!(run.last_pa_entry, a[end - 1]);
                if k > 0 {
                    prop_assert_ne!(index.columns()[j].runs[k - 1].symbol, run.symbol);
                }
            }
            runs += index.columns()[j].runs.len() as u64;
        }
        prop_assert_eq!(index.runs(), runs);
    }

    #[test]
    fn sweep_matches_colex_sort(panel in panel_strategy(32, 48)) {
        let index = build_index(&panel);
        let arrays = build_full_arrays(&panel);
        let mut visited = 0;
        sweep(&index, |j, ws, _| {
            assert_eq!(ws.current_prefix_array(), brute_prefix_array(&panel, j + 1));
            assert_eq!(ws.columns_processed(), j + 1);
            visited += 1;
            Ok(())
        }).unwrap();
        prop_assert_eq!(visited, panel.length());
        for j in 0..=panel.length() {
            prop_assert_eq!(&arrays.prefix[j], &brute_prefix_array(&panel, j));
        }
    }

    #[test]
    fn divergence_matches_common_suffixes(panel in panel_strategy(32, 48)) {
        let index = build_index(&panel);
        let arrays = build_full_arrays(&panel);
        sweep_with_divergence(&index, |j, list, div, _| {
            assert_eq!(div.current_divergence(), brute_absolute_divergence(&panel, j + 1));
            assert_eq!(div.current_order(), list.current_prefix_array());
            Ok(())
        }).unwrap();
        for j in 0..=panel.length() {
            let want: Vec<u32> = brute_divergence(&panel, j).iter().map(|&d| d as u32).collect();
            prop_assert_eq!(&arrays.divergence[j], &want);
        }
    }

    #[test]
    fn segment_max_over_any_block(
        panel in panel_strategy(24, 32),
        picks in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 8),
    ) {
        let index = build_index(&panel);
        let h = panel.height();
        let mut list = PrefixListWorkspace::new(h).unwrap();
        let mut div = DivergenceWorkspace::new(h).unwrap();
        for j in 0..=panel.length() {
            let a = list.current_prefix_array();
            let d = brute_absolute_divergence(&panel, j);
            for (x, y) in &picks {
                let (p, q) = (x.index(h).min(y.index(h)), x.index(h).max(y.index(h)));
                let want = *d[p..=q].iter().max().unwrap();
                prop_assert_eq!(div.segment_max(a[p], a[q]), want);
            }
            if j < panel.length() {
                let col = &index.columns()[j];
                div.advance_column(&list, col, j).unwrap();
                list.advance_column(col, j).unwrap();
            }
        }
    }

    #[test]
    fn smems_are_exact_and_unnested((panel, queries) in panel_with_queries(16, 32, 4)) {
        for q in &queries {
            let smems = find_smems_oracle(&panel, q).unwrap();
            prop_assert_eq!(&smems, &brute_smems(&panel, q));
            for (k, &(s, e)) in smems.iter().enumerate() {
                prop_assert!(!brute_matching_rows(&panel, q, s, e).is_empty());
                for &(s2, e2) in &smems[k + 1..] {
                    prop_assert!(s < s2 && e < e2, "({},{}) and ({},{}) nest", s, e, s2, e2);
                }
            }
        }
    }

    #[test]
    fn flush_output_is_split_independent(
        (panel, queries) in panel_with_queries(24, 40, 5),
        b in 1u64..12,
        cut in any::<prop::sample::Index>(),
    ) {
        let index = build_index(&panel);
        let arrays = build_full_arrays(&panel);
        let qs = QuerySet::new(panel.length(), queries).unwrap();
        let batch = collect_records(&panel, &arrays, &qs, true).unwrap();
        let whole = flush(&index, &batch.records).unwrap();
        let mut direct = Vec::new();
        for rec in &batch.records {
            let a = &arrays.prefix[rec.end_col as usize + 1];
            direct.extend_from_slice(&a[rec.lo as usize..=rec.hi as usize]);
            prop_assert_eq!(a[rec.hi as usize], rec.last_hap_id);
        }
        let ids: Vec<u32> = whole.entries.iter().map(|e| e.haplotype_id).collect();
        prop_assert_eq!(ids, direct);

        let acc = accumulate(&index, BatchPolicy::with_threshold(b), batch.records.iter().copied()).unwrap();
        prop_assert_eq!(&acc.entries, &whole.entries);

        let m = cut.index(batch.records.len() + 1);
        let mut joined = flush(&index, &batch.records[..m]).unwrap().entries;
        joined.extend(flush(&index, &batch.records[m..]).unwrap().entries);
        prop_assert_eq!(&joined, &whole.entries);

        let requests: Vec<_> = batch.records.iter().map(|r| EndpointRequest::from_record(r, &arrays)).collect();
        prop_assert_eq!(&flush_endpoints(&index, &requests).unwrap().entries, &whole.entries);
    }

    #[test]
    fn binary_formats_round_trip((panel, queries) in panel_with_queries(24, 40, 4), starts in any::<bool>()) {
        let index = build_index(&panel);
        let mut buf = Vec::new();
        write_index(&mut buf, &index).unwrap();
        prop_assert_eq!(read_index(&mut buf.as_slice()).unwrap(), index);

        let arrays = build_full_arrays(&panel);
        let qs = QuerySet::new(panel.length(), queries).unwrap();
        let batch = collect_records(&panel, &arrays, &qs, starts).unwrap();
        let mut buf = Vec::new();
        write_batch(&mut buf, &batch).unwrap();
        prop_assert_eq!(read_batch(&mut buf.as_slice(), starts).unwrap(), batch);
    }

    #[test]
    fn panel_text_round_trip(panel in panel_strategy(16, 32)) {
        prop_assume!(panel.length() > 0);
        let reparsed = parse_panel(&panel.to_text()).unwrap();
        prop_assert_eq!(reparsed.rows().collect::<Vec<_>>(), panel.rows().collect::<Vec<_>>());
    }

    #[test]
    fn truncated_index_is_rejected(panel in panel_strategy(8, 16), cut in any::<prop::sample::Index>()) {
        let mut buf = Vec::new();
        write_index(&mut buf, &build_index(&panel)).unwrap();
        let n = cut.index(buf.len());
        prop_assert!(read_index(&mut &buf[..n]).is_err());
    }
}
