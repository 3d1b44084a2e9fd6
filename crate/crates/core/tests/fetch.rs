mod common;

use std::time::Duration;

use common::{MockServer, SMALL_GRID};
use flood_depth::dem_fetch::{BoundingBox, DemClient, FetchRequest};
use flood_depth::Error;

const KEY: &str = "test-key-7f3a";

fn request() -> FetchRequest {
    FetchRequest::new(BoundingBox { west: -95.4, south: 29.7, east: -95.3, north: 29.8 }, KEY)
}

fn client(server: &MockServer) -> DemClient {
    DemClient::new(&server.base_url).unwrap().backoff(Duration::from_millis(5))
}

#[test]
fn success_parses_body_in_one_request() {
    let server = MockServer::start(vec![(200, SMALL_GRID.to_string())]);
    let dem = client(&server).fetch_dem(&request()).unwrap();
    assert_eq!((dem.grid.ncols, dem.grid.nrows), (3, 3));
    assert_eq!(dem.grid.crs_id, "EPSG:4326");
    assert_eq!(dem.values, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
    let reqs = server.requests();
    assert_eq!(reqs.len(), 1);
    assert!(reqs[0].starts_with("GET /API/globaldem?"));
    for part in ["demtype=SRTMGL1", "south=29.7", "north=29.8", "west=-95.4", "east=-95.3", "outputFormat=AAIGrid"] {
        assert!(reqs[0].contains(part), "{} missing {part}", reqs[0]);
    }
}

#[test]
fn server_errors_are_retried() {
    let server = MockServer::start(vec![
        (500, "busy".into()),
        (500, "busy".into()),
        (200, SMALL_GRID.to_string()),
    ]);
    let dem = client(&server).fetch_dem(&request()).unwrap();
    assert_eq!(dem.values.len(), 9);
    assert_eq!(server.requests().len(), 3);
}

#[test]
fn unauthorized_is_not_retried() {
    let server = MockServer::start(vec![(401, format!("bad key {KEY}"))]);
    let err = client(&server).fetch_dem(&request()).unwrap_err();
    assert!(matches!(err, Error::InvalidKey), "{err:?}");
    assert_eq!(server.requests().len(), 1);
    assert!(!err.to_string().contains(KEY));
}

#[test]
fn persistent_server_errors_exhaust_retries() {
    let server = MockServer::start(vec![(500, "down".into())]);
    let err = client(&server).fetch_dem(&request()).unwrap_err();
    assert!(matches!(err, Error::Transport { attempts: 4, .. }), "{err:?}");
    assert_eq!(err.exit_code(), 2);
    assert_eq!(server.requests().len(), 4);
}

#[test]
fn other_client_errors_fail_without_retry_and_redact_key() {
    let server = MockServer::start(vec![(404, format!("no product for key {KEY}"))]);
    let err = client(&server).fetch_dem(&request()).unwrap_err();
    match &err {
        Error::Request { status, message } => {
            assert_eq!(*status, 404);
            assert!(!message.contains(KEY));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(err.exit_code(), 1);
    assert_eq!(server.requests().len(), 1);
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    // Bind then drop to get a port nobody is listening on.
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = DemClient::new(format!("http://127.0.0.1:{port}"))
        .unwrap()
        .backoff(Duration::from_millis(1))
        .fetch_dem(&request())
        .unwrap_err();
    assert!(matches!(err, Error::Transport { attempts: 4, .. }), "{err:?}");
    assert!(!err.to_string().contains(KEY));
}

#[test]
fn garbage_body_is_a_format_error() {
    let server = MockServer::start(vec![(200, "<html>maintenance</html>".into())]);
    let err = client(&server).fetch_dem(&request()).unwrap_err();
    assert!(matches!(err, Error::Format(_)), "{err:?}");
}

#[test]
fn default_retry_schedule_doubles_from_one_second() {
    let c = DemClient::new("http://localhost").unwrap();
    assert_eq!(
        c.retry_delays(),
        vec![Duration::from_secs(1), Duration::from_secs(2), Duration::from_secs(4)]
    );
}
