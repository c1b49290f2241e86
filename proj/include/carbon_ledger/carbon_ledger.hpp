#pragma once

#include <carbon_ledger/apps.hpp>
#include <carbon_ledger/date.hpp>
#include <carbon_ledger/decimal.hpp>
#include <carbon_ledger/engine.hpp>
#include <carbon_ledger/errors.hpp>
#include <carbon_ledger/ingest.hpp>
#include <carbon_ledger/layer2.hpp>
#include <carbon_ledger/model.hpp>
#include <carbon_ledger/remote.hpp>
#include <carbon_ledger/report.hpp>
#include <carbon_ledger/units.hpp>
