#pragma once

#include "egfem/assembly.hpp"
#include "egfem/basis.hpp"
#include "egfem/error.hpp"
#include "egfem/harness.hpp"
#include "egfem/linalg.hpp"
#include "egfem/mesh.hpp"
#include "egfem/norms.hpp"
#include "egfem/problem.hpp"
#include "egfem/problems.hpp"
#include "egfem/quadrature.hpp"
#include "egfem/report.hpp"
#include "egfem/space.hpp"
#include "egfem/sparse.hpp"
#include "egfem/tensor2d.hpp"
