use ifp::corpus;

#[test]
fn every_script_checks() {
    for (f, _) in corpus::FILES.iter().filter(|(f, _)| f.ends_with(".ifp")) {
        if let Err(e) = corpus::script(f) {
            panic!("{e}");
        }
    }
}
