macro_rules! example {
    ($m:ident, $file:literal) => {
        mod $m {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
        #[test]
        fn $m() {
            $m::run_example().expect($file);
        }
    };
}

example!(truth_tables, "truth_tables.rs");
example!(bulk_ops, "bulk_ops.rs");
example!(bbop_program, "bbop_program.rs");
example!(trace_check, "trace_check.rs");
example!(aes_offload, "aes_offload.rs");
example!(matching_index, "matching_index.rs");
example!(dna_search, "dna_search.rs");
example!(report_files, "report_files.rs");
