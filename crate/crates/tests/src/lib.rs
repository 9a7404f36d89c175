//! Holds the `acceptance` test target; it runs after every other test
//! target in the workspace.
