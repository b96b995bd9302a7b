//! `fetch_reference` against a loopback HTTP server.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;

use flate2::write::GzEncoder;
use flate2::Compression;
use genovault::sequence::{fetch_reference, parse_fasta, AmbiguityPolicy, FetchError, FetchOptions};

const FASTA: &[u8] = b">chrT test\nACGTACGTTGCA\nGGCC\n";

/// Serves `routes` (path, status, body) for `requests` connections.
fn serve(routes: Vec<(&'static str, u16, Vec<u8>)>, requests: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming().take(requests) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut header = String::new();
                reader.read_line(&mut header).unwrap();
                if header == "\r\n" || header.is_empty() {
                    break;
                }
            }
            let path = request_line.split_whitespace().nth(1).unwrap_or("/");
            let (status, body) = routes
                .iter()
                .find(|(p, _, _)| *p == path)
                .map(|(_, s, b)| (*s, b.clone()))
                .unwrap_or((404, b"not found".to_vec()));
            let head = format!(
                "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                body.len()
            );
            stream.write_all(head.as_bytes()).unwrap();
            stream.write_all(&body).unwrap();
        }
    });
    format!("http://{addr}")
}

fn gzip(data: &[u8]) -> Vec<u8> {
    let mut enc = GzEncoder::new(Vec::new(), Compression::default());
    enc.write_all(data).unwrap();
    enc.finish().unwrap()
}

#[test]
fn plain_gzip_truncated_and_missing() {
    let gz = gzip(FASTA);
    let truncated = gz[..gz.len() / 2].to_vec();
    let base = serve(
        vec![
            ("/plain.fa", 200, FASTA.to_vec()),
            ("/packed.fa.gz", 200, gz),
            ("/broken.fa.gz", 200, truncated),
        ],
        4,
    );
    let dir = tempfile::tempdir().unwrap();
    let opts = FetchOptions::default();

    let out = dir.path().join("plain.fa");
    fetch_reference(&format!("{base}/plain.fa"), &out, opts).unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), FASTA);

    let out = dir.path().join("sub/unpacked.fa");
    fetch_reference(&format!("{base}/packed.fa.gz"), &out, opts).unwrap();
    let text = std::fs::read(&out).unwrap();
    assert_eq!(text, FASTA);
    let recs = parse_fasta(&text, AmbiguityPolicy::Reject).unwrap();
    assert_eq!(recs[0].sequence.bases(), "ACGTACGTTGCAGGCC");

    let out = dir.path().join("broken.fa");
    let err = fetch_reference(&format!("{base}/broken.fa.gz"), &out, opts).unwrap_err();
    assert!(matches!(err, FetchError::Decompress(_)), "{err}");
    assert!(!out.exists());

    let out = dir.path().join("missing.fa");
    let err = fetch_reference(&format!("{base}/missing.fa"), &out, opts).unwrap_err();
    assert!(matches!(err, FetchError::Status { status: 404, .. }), "{err}");
    assert!(err.is_network());
    assert!(!out.exists());
}

#[test]
fn refused_connection_is_a_network_error() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let dir = tempfile::tempdir().unwrap();
    let err = fetch_reference(
        &format!("http://127.0.0.1:{port}/x.fa"),
        &dir.path().join("x.fa"),
        FetchOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, FetchError::Transport { .. }), "{err}");
}
