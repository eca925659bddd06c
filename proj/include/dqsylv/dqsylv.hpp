#pragma once

// Everything except the command-line front end (cli.hpp, which pulls in CLI11).

#include "quaternion.hpp"
#include "quat_matrix.hpp"
#include "dual_quat_matrix.hpp"
#include "matrix_io.hpp"
#include "random.hpp"
#include "conditions.hpp"
#include "solvers.hpp"
#include "sylvester.hpp"
#include "oracle.hpp"
#include "handeye.hpp"
#include "imagecipher.hpp"
#include "report.hpp"
#include "selftest.hpp"
